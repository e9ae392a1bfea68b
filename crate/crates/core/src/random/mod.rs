//! Random monotone operator families, their mean operators and selections.

pub mod gallery;
pub mod law;
pub mod model;
pub mod seed;
pub mod selection;

pub use gallery::{phelps_gallery, standard_witnesses, GalleryEntry};
pub use law::ScalarLaw;
pub use model::{Draw, Family, RandomOperatorModel, GALLERY_CYCLE};
pub use seed::{draw_seed, mix64, DrawRng};
pub use selection::{balanced_selection, SelectionSpec};
