use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("root solver did not converge (max residual {residual:e})")]
    RootSolver { residual: f64 },

    #[error("point is not fixed (|f(z) - z| = {residual:e})")]
    NotFixed { residual: f64 },

    #[error("multiplier {re} + {im}i is not 1")]
    NotParabolic { re: f64, im: f64 },

    #[error("series vanishes to order {0}; germ is degenerate")]
    DegenerateGerm(usize),

    #[error("w = {re} + {im}i lies inside the chart validity radius {radius}")]
    InsideValidityRadius { re: f64, im: f64, radius: f64 },

    #[error("point not attracted into petal {petal} within {iterations} iterations")]
    NotInPetal { petal: usize, iterations: usize },

    #[error("iteration cap {0} exceeded before convergence")]
    CapExceeded(usize),

    #[error("inverse branch left the petal at step {0}")]
    InverseBranch(usize),

    #[error("newton iteration diverged: {0}")]
    NewtonDivergence(String),

    #[error("point within {eps:e} of the region boundary")]
    BoundaryAmbiguous { eps: f64 },

    #[error("argument principle gave {0}, not close to an integer")]
    NonIntegralDegree(f64),

    #[error("w lies on the image of the boundary")]
    OnBoundaryImage,

    #[error("ray lost lock at sample {index} (potential {potential:e})")]
    RayLostLock { index: usize, potential: f64 },

    #[error("structural failure: {0}")]
    Structural(String),

    #[error("no internal fixed point and no internal petal")]
    EstimationImpossible,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
