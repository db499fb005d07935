//! Dihedral mod-`p` Galois representations induced from class group
//! characters of quadratic fields, and the theta series that realise them.
//!
//! All arithmetic is exact: character values and q-expansion coefficients
//! live in `Z[zeta_m]` and are reduced to a residue field only on request.

pub mod arith;
pub mod cyclotomic;
pub mod error;
pub mod galoisrep;
pub mod heckeold;
pub mod modcheck;
pub mod quadfield;
pub mod scalar;
pub mod serretrick;
pub mod theta;

pub use cyclotomic::{cyclotomic_poly, reduce_mod_p, CycElt, CycModulus, ResElt, ResidueField};
pub use error::{Error, Result};
pub use galoisrep::{ClassCharacter, DihedralRep, LiftCase, SerreInvariants, WeightReport};
pub use heckeold::{
    ap_zero_stabilize, char_poly, degeneracy_embed, tp_action_level_divisible, tp_matrix,
    OldformBlock,
};
pub use modcheck::{
    classify_reducible, conductor_divides_level, verify_modularity, ModularityReport, Reducibility,
};
pub use quadfield::{
    fundamental_unit_norm, kronecker_symbol, splitting_type, ClassGroupRecord, Form,
    FormClassGroup, FundamentalDiscriminant, QuadInt, SplittingType,
};
pub use scalar::Scalar;
pub use serretrick::{find_auxiliary, simple_negative_norm, twisted_character, AuxiliaryPrime};
pub use theta::{hecke_consistency, reduce_qexp, theta_coeffs, IdealCharacter, QExpansion};
