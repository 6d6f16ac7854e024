//! Exact computation of twisted Kurihara numbers of elliptic curves over Q,
//! Kolyvagin-prime search, and the derived Galois-module structure of Selmer
//! groups over abelian fields.

pub mod arith;
pub mod padic;
pub mod real;
pub mod chars;
pub mod curve;
pub mod modsym;
pub mod analytic;
pub mod kurihara;
pub mod groupring;
pub mod selmer;
pub mod pipeline;
