pub mod annvar;
pub mod certify;
pub mod dilation;
pub mod error;
pub mod inner;
pub mod instance;
pub mod json;
pub mod linalg;
pub mod opcore;
pub mod poly;
pub mod report;

pub use error::{Error, Result};
