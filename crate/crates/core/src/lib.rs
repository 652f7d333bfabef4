pub mod abgroup;
pub mod cocycle;
pub mod cyclotomic;
pub mod error;
pub mod homog;
pub mod orbits;
pub mod realize;
pub mod secthree;

pub use abgroup::{FinAbGroup, GroupElem, GroupMap};
pub use cocycle::{FactorSet, PairSpec, SymplecticShape};
pub use cyclotomic::{CycNum, RootOfUnity};
pub use error::{Error, Result};
pub use homog::{HomMapData, MapMode, WitnessData};
pub use orbits::ModMatrix2;
pub use realize::{CycMatrix, RealizedAlgebra};
pub use secthree::{FormKind, InvolutionDatum};
