pub mod boxconfig;
pub mod cancellation;
pub mod cli;
pub mod exactalg;
pub mod hilbert;
pub mod tqft;
pub mod vertexcore;
