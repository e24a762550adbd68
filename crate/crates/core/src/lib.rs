//! Estimation of group properties on graphs that can only be observed through
//! partial samples and a noisy node classifier.
//!
//! The crate covers the full pipeline:
//!
//! * [`graph`]: labeled undirected graphs, a homophilous preferential-attachment
//!   generator, edge-list ingestion and exact ground-truth measures.
//! * [`samplers`]: re-weighted random walks, node/edge/snowball baselines and
//!   importance resampling of degree-biased walks.
//! * [`noise`]: confusion matrices, label noise and the dyadic (edge-level)
//!   misclassification matrix.
//! * [`quantify`]: confusion-matrix corrections, in-group edge share, Coleman
//!   homophily and variance inflation factors.
//! * [`experiments`]: seeded, replicated simulation grids with CSV output.
//!
//! ```
//! use groupwalk::{generate_homophilous_graph, ground_truth, ConfusionMatrix, Group};
//! use groupwalk::noise::apply_noise;
//! use groupwalk::quantify::adjust_proportions;
//! use groupwalk::rng::seeded;
//! use groupwalk::samplers::{rwrw_proportions, rwrw_walk, LabelField, SeedMode};
//!
//! let g = generate_homophilous_graph(10_000, 4, 0.2, 0.8, 1)?;
//! let c = ConfusionMatrix::symmetric(0.2)?;
//! let noisy = apply_noise(g.labels(), &c, &mut seeded(2));
//! let walk = rwrw_walk(&g, 3000, SeedMode::DegreeProportional, 0, Some(&noisy), &mut seeded(3))?;
//! let measured = rwrw_proportions(&walk, LabelField::Noisy)?;
//! let corrected = adjust_proportions(&measured, &c)?;
//! let truth = ground_truth(&g, 0.2)?.proportions.get(Group::B);
//! assert!((corrected.b - truth).abs() < 0.1);
//! assert!(measured.b > truth);
//! # Ok::<(), groupwalk::Error>(())
//! ```

pub mod error;
pub mod experiments;
pub mod graph;
pub mod noise;
pub mod quantify;
pub mod rng;
pub mod samplers;

pub use error::{Error, Result};
pub use graph::{generate_homophilous_graph, ground_truth, Graph, Group, GroundTruth, HomophilyBa};
pub use noise::{ConfusionMatrix, DyadicMatrix};
pub use quantify::{EdgeVector, HomophilyIndex, PropVector};
