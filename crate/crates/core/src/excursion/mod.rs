//! Brownian paths on a grid and the objects built from them for `α = 2`.

mod brownian;
mod grid;
mod hausdorff;
mod local_time;
mod space;
mod time_change;

pub use brownian::{
    bessel3_hitting_cdf, bessel3_to_one, conditioned_excursion, conditioned_excursion_with,
    refine_bridge, simulate_straddling_excursion, simulate_straddling_w, simulate_two_sided_bm,
    straddling_bounds, straddling_excursion, WalkOptions, CEILING_FACTOR,
};
pub use grid::{GridMeta, PathGrid};
pub use hausdorff::{below_level_intensity, excursion_hausdorff_law};
pub use local_time::{
    default_window, level_grid, local_time_at, local_time_profile, local_time_profile_with,
    local_time_sd, window_local_time, LocalTimeProfile, DEFAULT_WINDOW_FACTOR,
};
pub use space::{evans_space_from_excursion, limit_space_from_w, limit_space_from_zeros};
pub use time_change::{scaled_excursion_family, t_epsilon, time_change_v, ScaledFamily};
