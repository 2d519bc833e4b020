//! Published statistics of the four public fraud-detection benchmarks.
//!
//! A manifest that names one of these under `"benchmark"` is validated
//! against these numbers without restating them.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationStat {
    pub name: String,
    pub edges: u64,
}

/// Reference statistics for a dataset. `None` means not published.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct ExpectedStats {
    pub nodes: Option<u64>,
    /// Total edge count. Only checked for single-relation datasets, since the
    /// published multi-relation totals do not equal the relation sums.
    pub edges: Option<u64>,
    /// Negatives per positive, e.g. 5.9 for "1:5.9".
    pub neg_per_pos: Option<f64>,
    pub features: Option<u64>,
    pub isolated: Option<u64>,
    pub relations: Vec<RelationStat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Benchmark {
    #[serde(rename = "yelpchi")]
    YelpChi,
    #[serde(rename = "amazon")]
    Amazon,
    #[serde(rename = "t-finance")]
    TFinance,
    #[serde(rename = "t-social")]
    TSocial,
}

impl Benchmark {
    pub const ALL: [Benchmark; 4] = [Benchmark::YelpChi, Benchmark::Amazon, Benchmark::TFinance, Benchmark::TSocial];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::YelpChi => "YelpChi",
            Benchmark::Amazon => "Amazon",
            Benchmark::TFinance => "T-Finance",
            Benchmark::TSocial => "T-Social",
        }
    }

    pub fn expected(self) -> ExpectedStats {
        let rel = |name: &str, edges| RelationStat {
            name: name.into(),
            edges,
        };
        match self {
            Benchmark::YelpChi => ExpectedStats {
                nodes: Some(45_954),
                edges: Some(3_846_979),
                neg_per_pos: Some(5.9),
                features: Some(32),
                isolated: Some(22_123),
                relations: vec![
                    rel("R-U-R", 49_315),
                    rel("R-S-R", 3_402_743),
                    rel("R-T-R", 573_616),
                ],
            },
            Benchmark::Amazon => ExpectedStats {
                nodes: Some(11_944),
                edges: Some(4_398_392),
                neg_per_pos: Some(10.5),
                features: Some(25),
                isolated: None,
                relations: vec![
                    rel("U-P-U", 175_608),
                    rel("U-S-U", 3_566_479),
                    rel("U-V-U", 1_036_737),
                ],
            },
            Benchmark::TFinance => ExpectedStats {
                nodes: Some(39_357),
                edges: Some(21_222_543),
                neg_per_pos: Some(21.8),
                features: Some(10),
                isolated: None,
                relations: vec![],
            },
            Benchmark::TSocial => ExpectedStats {
                nodes: Some(5_781_065),
                edges: Some(73_105_508),
                neg_per_pos: Some(33.2),
                features: Some(10),
                isolated: None,
                relations: vec![],
            },
        }
    }
}
