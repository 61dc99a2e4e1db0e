//! Samplers and Hamming-ball search.

pub mod ball;
pub mod rng;
pub mod sample;

pub use ball::{ball_search_min, enumerate_ball, revolving_door, walk_ball, BallMin, BallSpec, DoorStep};
pub use rng::RngStream;
pub use sample::{
    correlated_sample, default_draw_budget, in_typical_shell, light_coords, rejection_sample_threshold,
    shell_contains, uniform_assignment, Draw, ThresholdSampler,
};
