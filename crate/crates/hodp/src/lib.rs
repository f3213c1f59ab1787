pub mod afsm;
pub mod cli;
pub mod dp;
pub mod framework;
pub mod ordering;
pub mod processors;
pub mod syntax;
pub mod term;
