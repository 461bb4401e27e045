pub mod cli;
pub mod crt;
pub mod field;
pub mod oracle;
pub mod phasecore;
pub mod search;
