pub mod casestudy;
pub mod cli;
pub mod gen;
pub mod hoare;
pub mod lang;
pub mod linalg;
pub mod semantics;
