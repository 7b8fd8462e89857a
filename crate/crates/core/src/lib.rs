pub mod arrow;
pub mod certificate;
pub mod clopen;
pub mod conemap;
pub mod document;
pub mod embed;
pub mod engine;
pub mod error;
pub mod interval;
pub mod krcover;
pub mod point;
pub mod radial;
pub mod tailclass;
pub mod word;
