pub mod cli;
pub mod dynamics;
pub mod fock;
pub mod hamiltonian;
pub mod opwave;
pub mod ordering;
pub mod scattering;
pub mod specfun;
