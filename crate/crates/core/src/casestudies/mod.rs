//! Chemical-engineering case studies: PID tuning of a jacketed CSTR and
//! the steady-state Williams-Otto reactor.

pub mod cstr;
pub mod newton;
pub mod ode;
pub mod williams_otto;

pub use cstr::{
    cstr_objective, cstr_problem, cstr_rhs, pid_control, CstrConfig, CstrParams, CstrState,
    PidGains,
};
pub use williams_otto::{wo_objective, wo_problem, wo_residuals, WoConfig, WoParams, WoState};
