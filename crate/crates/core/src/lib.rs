pub mod bnb;
pub mod instance;
pub mod instance_file;
pub mod lp;
pub mod lpformat;
pub mod milp;
pub mod oracle;
pub mod rational;
pub mod reduction;
pub mod simbench;
