//! Instance generation, the `farkas 1` file format, and the logarithmic-cone
//! counterexample.

pub mod format;
pub mod generate;
pub mod lncone;

pub use format::{read_instance, write_instance, CertificateSection, Entry, FormatError, InstanceFile};
pub use generate::{generate, generate_with_witness, BranchSpec, GenSpec, Generated, GenerationError, Witness};
pub use lncone::{lncone_membership, lncone_nonclosedness_demo, LnConePoint, LnMembership, LnWitness};
