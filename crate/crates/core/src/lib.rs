pub mod commutant;
pub mod crossed;
pub mod dynamics;
pub mod linalg;
pub mod partition;
pub mod rational;
pub mod instance;
pub mod enumerate;
pub mod fixtures;
pub mod random;
pub mod report;
pub mod selftest;
pub mod cli;
