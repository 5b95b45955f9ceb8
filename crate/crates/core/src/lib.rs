pub mod cli;
pub mod error;
pub mod heckman_opdam;
pub mod hypergeom;
pub mod integrate;
pub mod jack;
pub mod rankone;
pub mod report;
pub mod selberg;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
