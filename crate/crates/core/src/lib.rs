//! Randomized approximation of quantum partition functions for ferromagnetic
//! XY-type spin Hamiltonians.
//!
//! The pipeline has three stages:
//!
//! 1. [`trotter`] turns `e^{-βH}` into an ordered product of elementary gates
//!    `f`, `g`, `h` whose matrices have nonnegative entries.
//! 2. [`matchgraph`] replaces every gate by a small weighted graph (a gadget)
//!    and wires the gadgets into one graph whose perfect-matching sum equals
//!    the trace of the gate product.
//! 3. [`estimator`] estimates that perfect-matching sum with a telescoping
//!    product of level ratios, each ratio measured with the weighted
//!    matchings Markov chain of [`sampler`].
//!
//! Every stage has a brute-force counterpart ([`hamiltonian`] for dense
//! thermal quantities, [`exact`] for matching sums, exact stationary tables in
//! [`sampler`]) so the approximations can be checked on small instances.
//!
//! ```
//! use qferro::hamiltonian::RawHamiltonian;
//!
//! let h = RawHamiltonian::new(1).field(1, 1.0).validate().unwrap();
//! let z = h.exact_partition(1.0).unwrap();
//! assert!((z - (1.0 + (-2.0f64).exp())).abs() < 1e-12);
//! ```

pub mod dense;
pub mod error;
pub mod estimator;
pub mod exact;
pub mod hamiltonian;
pub mod matchgraph;
pub mod pipeline;
pub mod rng;
pub mod sampler;
pub mod trotter;

pub use error::{Error, Result};

use serde::{Deserialize, Serialize};

/// Parameter regime used by the sampler and the estimator.
///
/// `Theory` derives every budget from the worst-case bounds; `Practical`
/// takes user-sized sample counts and chain lengths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Theory,
    #[default]
    Practical,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Theory => f.write_str("theory"),
            Mode::Practical => f.write_str("practical"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theory" => Ok(Mode::Theory),
            "practical" => Ok(Mode::Practical),
            other => Err(Error::InvalidParameter(format!("unknown mode `{other}`"))),
        }
    }
}
