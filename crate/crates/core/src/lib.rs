//! Kazhdan–Lusztig and inverse Kazhdan–Lusztig polynomials in the symmetric
//! group, with the Bruhat-order machinery they rest on and checks of closed
//! forms for two families of singular pairs.
//!
//! ```
//! use klinv_core::{inverse_kl, KLCache, Permutation};
//!
//! let x: Permutation = "2,1,5,4,3".parse().unwrap();
//! let w: Permutation = "5,2,4,3,1".parse().unwrap();
//! let mut cache = KLCache::new();
//! assert_eq!(inverse_kl(&x, &w, &mut cache).unwrap().to_string(), "1 + 2q");
//! ```

pub mod bruhat;
pub mod error;
pub mod families;
pub mod klcore;
pub mod perm;
pub mod poly;
pub mod verify;

pub use bruhat::{
    bruhat_leq, coatom_count, interval, rank_count, rank_difference, render_bruhat_picture,
    verify_monotone_difference, BruhatInterval, RankDifferenceTable,
};
pub use error::{Error, Result};
pub use families::{
    closed_form_inverse, closed_form_regular, f_km, lemma_tech1_check, lemma_tech2_check,
    make_family, reconstruct_inverse, FamilyKind, FamilySpec, IdentityCheck, PairKind,
};
pub use klcore::{
    delta_set, descent_reduction_check, inverse_kl, is_smooth_top, kl_polynomial, mu, tilde_reduce,
    verify_inversion_identity, CacheStats, DescentStrategy, KLCache,
};
pub use perm::{flatten, Permutation};
pub use poly::IntPolynomial;
pub use verify::{VerificationReport, VerifyOptions};
