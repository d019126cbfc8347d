//! Named benchmark instances, e.g. "2RS12" or "3T[50]".

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{gen_kuhn3, gen_random_game, gen_ride_sharing, gen_tricks, RandomGameSpec, RideSharingSpec, RoadMap, TricksSpec};
use crate::game::Game;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Benchmark {
    RideSharing(RideSharingSpec),
    Kuhn3 { ranks: usize },
    Tricks(TricksSpec),
    Random(RandomGameSpec),
}

impl Benchmark {
    pub fn generate(&self) -> Result<Game, ManifestError> {
        let gen_err = |e: &dyn std::fmt::Display| ManifestError::Generator(e.to_string());
        match self {
            Benchmark::RideSharing(s) => gen_ride_sharing(s).map_err(|e| gen_err(&e)),
            Benchmark::Kuhn3 { ranks } => gen_kuhn3(*ranks).map_err(|e| gen_err(&e)),
            Benchmark::Tricks(s) => gen_tricks(s).map_err(|e| gen_err(&e)),
            Benchmark::Random(s) => gen_random_game(s).map_err(|e| gen_err(&e)),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub games: BTreeMap<String, Benchmark>,
}

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("manifest: {0}")]
    Parse(#[from] serde_path_to_error::Error<serde_json::Error>),
    #[error("unknown benchmark {0:?}")]
    Unknown(String),
    #[error("{0}")]
    Generator(String),
}

impl Manifest {
    pub fn get(&self, name: &str) -> Result<&Benchmark, ManifestError> {
        self.games.get(name).ok_or_else(|| ManifestError::Unknown(name.to_string()))
    }

    pub fn generate(&self, name: &str) -> Result<Game, ManifestError> {
        self.get(name)?.generate()
    }
}

pub fn load_manifest(bytes: &[u8]) -> Result<Manifest, ManifestError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    Ok(serde_path_to_error::deserialize(de)?)
}

/// Built-in instances.
pub fn default_manifest() -> Manifest {
    let rs = |map, horizon| Benchmark::RideSharing(RideSharingSpec { map, horizon });
    let tricks = |deals, perfect_info| Benchmark::Tricks(TricksSpec { deals, seed: 0, perfect_info });
    let games = [
        ("2RS12", rs(RoadMap::Map1, 2)),
        ("2RS22", rs(RoadMap::Map2, 2)),
        ("2RS13", rs(RoadMap::Map1, 3)),
        ("3K3", Benchmark::Kuhn3 { ranks: 3 }),
        ("3K4", Benchmark::Kuhn3 { ranks: 4 }),
        ("3T[50]", tricks(Some(50), false)),
        ("3T", tricks(None, false)),
        ("3TP", tricks(None, true)),
    ];
    Manifest { games: games.into_iter().map(|(k, v)| (k.to_string(), v)).collect() }
}
