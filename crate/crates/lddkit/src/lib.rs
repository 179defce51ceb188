//! Low-diameter decompositions of weighted graphs: blurry ball growing, terminal
//! clustering with delays, strong-diameter clustering, star decompositions,
//! low-stretch spanning trees, sparse covers and l1 embeddings, plus
//! independent checkers for each guarantee.

pub mod blurry;
pub mod cli;
pub mod clustering;
pub mod embed;
pub mod gen;
pub mod graph;
pub mod lsst;
pub mod oracles;
pub mod params;
pub mod rational;
pub mod strong;
pub mod verify;
