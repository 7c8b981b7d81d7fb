pub mod avoidance;
pub mod bench;
pub mod collision;
pub mod io;
pub mod sim;
pub mod trajectory;
