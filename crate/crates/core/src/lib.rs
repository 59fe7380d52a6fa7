//! A kernel for the Calculus of Inductive Constructions with a sort
//! hierarchy split into `Prop`, `Set@i` and `Type@i`, a parametricity
//! translator whose every output is re-checked by the kernel, and the
//! forgetful embedding into plain CIC.
//!
//! ```
//! use cicr::frontend::Session;
//!
//! let mut s = Session::new();
//! s.run_str("demo", "Inductive nat : Set@0 := | O : nat | S : nat -> nat.\nParametricity nat.").unwrap();
//! assert!(s.env().inductive("nat_R").is_some());
//! ```

pub mod embed;
pub mod env;
pub mod error;
pub mod frontend;
pub mod names;
pub mod param;
pub mod print;
pub mod reduce;
pub mod term;
pub mod typecheck;

pub use env::{GlobalEnv, InductiveDecl, InductiveSpec, KernelConfig, Mode};
pub use error::{Error, Result};
pub use term::{Context, Name, Sort, Term};

// The guide's chapters, run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/sorts.md")]
    mod sorts {}
    #[doc = include_str!("../../../book/src/terms.md")]
    mod terms {}
    #[doc = include_str!("../../../book/src/inductives.md")]
    mod inductives {}
    #[doc = include_str!("../../../book/src/parametricity.md")]
    mod parametricity {}
    #[doc = include_str!("../../../book/src/large-elimination.md")]
    mod large_elimination {}
    #[doc = include_str!("../../../book/src/axioms.md")]
    mod axioms {}
    #[doc = include_str!("../../../book/src/embedding.md")]
    mod embedding {}
    #[doc = include_str!("../../../book/src/vernacular.md")]
    mod vernacular {}
}
