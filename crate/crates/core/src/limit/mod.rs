//! Limit objects: the ball-count process `Z`, its jump laws, the marginal
//! oracle, the limit tree and the mass process `X`.

mod offspring;
mod oracle;
mod tree;
mod xprocess;
mod zprocess;

pub use offspring::{
    branching_parameters, immigrant_pmf, offspring_pmf, tail_weight, Bias, OffspringDist, MAX_TAIL,
};
pub use oracle::{marginal_z_oracle, MarginalPmf, ORACLE_TOL};
pub use tree::build_limit_tree;
pub use xprocess::{simulate_x, x_marginal_cdf, x_marginal_mean};
pub use zprocess::{simulate_z, ZSample, ZSimulator, DEFAULT_K_TRUNC};
