//! Group presentations with enumerable relator streams, certified
//! word-problem engines, torsion towers and torsion-free universal quotients,
//! and the register-machine computability layer they are built on.
//!
//! Everything is deterministic: streams are restartable pure producers, and
//! every semi-decision procedure takes an explicit fuel budget, so identical
//! inputs always give identical outputs.

pub mod computability;
pub mod constructions;
pub mod presentations;
pub mod programs;
pub mod torsion;
pub mod words;
pub mod wordproblem;

pub use computability::{
    cantor_pair, cantor_unpair, crush, nth_prime, run, sigma2_eval, we_enumerate, Program, ReSet,
    RunOutcome, Sigma2Predicate,
};
pub use constructions::{
    build_pn, build_qn_complement, build_qphi, f2_universal_basis, prime_code, prime_decode,
    universal_tf_assembly, TorsionPreservingEmbedding,
};
pub use presentations::{
    abelianization_invariants, encode_finite_presentation, enumerate_finite_presentations,
    free_product, free_product_stream, k_torsion_quotient, CountablePresentation,
    FinitePresentation, Presentation, Provenance, RecursivePresentation, RelatorStream,
    Restartable, TaggedRelator,
};
pub use words::{
    enumerate_words, format_word, free_reduce, parse_word, Alphabet, GeneratorId, GeneratorNames,
    Letter, Sign, Word, WordEnumerator,
};
pub use torsion::{
    factor_closure, is_factor_complete, tor_tower_stream, torord_bounded, torsion_free_quotient,
    torsion_stream, FactorCompleteSet, OrderCertificate, TorordReport, TorsionWitness, TowerItem,
    TowerOrigin,
};
pub use wordproblem::{
    element_order_in_table, kb_complete, prove_trivial, refute_trivial_finite_quotient,
    todd_coxeter, torord_oracle_cyclics, verify_certificate, write_certificate, Certificate,
    CosetTable, Derivation, DerivationFactor, HomWitness, KbOutcome, Perm, RewriteSystem, Status,
    TcOutcome, Verdict,
};
