//! Benchmark and test game generators.

mod kuhn;
mod manifest;
mod random;
mod ride_sharing;
mod tricks;

pub use kuhn::{gen_kuhn3, KuhnError};
pub use manifest::{default_manifest, load_manifest, Benchmark, Manifest, ManifestError};
pub use random::{gen_random_game, RandomGameError, RandomGameSpec};
pub use ride_sharing::{gen_ride_sharing, map_data, RideSharingError, RideSharingSpec, RoadMap};
pub use tricks::{all_deals, card_name, gen_tricks, legal, trick_winner, TricksError, TricksSpec, DUMMY_HAND, FULL_DEALS};
