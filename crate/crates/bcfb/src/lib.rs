pub mod info;
pub mod lp;
pub mod polytope;
pub mod channels;
pub mod regions;
pub mod mcsim;
pub mod cli;
