pub mod borcherds;
pub mod cli;
pub mod exact;
pub mod fqm;
pub mod lattice;
pub mod numeric;
pub mod qseries;
pub mod verify;
pub mod vvmf;
pub mod weil;
