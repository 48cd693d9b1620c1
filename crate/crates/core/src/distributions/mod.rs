//! Jump-size and spacing laws, plus tail diagnostics.

mod diagnostics;
mod kesten;
mod spacing;
mod tail;

pub use diagnostics::{long_tail_ratio, sstar_ratio};
pub use kesten::{
    kesten_check, GridTail, KestenReport, MAX_GRID_POINTS, MAX_MASS_DEFECT, TAIL_FLOOR,
};
pub use spacing::SpacingModel;
pub use tail::{Family, TailModel};
