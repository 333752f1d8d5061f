pub mod ball;
pub mod dyadic;
pub mod poly;
pub mod qi;
pub mod roots;

pub use ball::{Ball, BallJson, ComplexBall};
pub use dyadic::{Dir, Dyadic, Mag};
pub use poly::{QiPolynomial, RationalFunction};
pub use qi::GaussianRational;
pub use roots::{complex_roots, RootBall};
