//! Exact algorithms for the shortest watchtower problem on imprecise terrains.

pub mod channel;
pub mod geom;
pub mod terrain;
pub mod visibility;
pub mod watchtower1d;
pub mod oracle;
pub mod random;
pub mod mesh;
pub mod sight;
pub mod watchtower25d;
