pub mod baselines;
pub mod blockenc;
pub mod comm;
pub mod instances;
pub mod linalg;
pub mod protocols;
pub mod qsvt;
pub mod vtaa;
