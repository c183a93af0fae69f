pub mod check;
pub mod converge;
pub mod figure;
pub mod simulate;
pub mod tail;
