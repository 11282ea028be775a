//! File formats and synthetic color generators: fvecs vectors, binary/text
//! color files, index snapshots, and ground-truth files. All formats are
//! little-endian and byte-stable under save → load → save.

mod colors;
mod fvecs;
mod gt_file;
mod snapshot;

pub use colors::{
    arxiv_colors, gen_colors_hyperplane, gen_colors_skewed, load_colors, save_colors,
    sift_skewed_colors,
};
pub use fvecs::{load_fvecs, save_fvecs};
pub use gt_file::{gt_from_bytes, gt_to_bytes, load_gt, save_gt};
pub use snapshot::{index_from_bytes, index_to_bytes, load_index, save_index};
