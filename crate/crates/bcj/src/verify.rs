//! The verification suites run by `bcj verify`.
//!
//! Each trial draws from its own ChaCha stream, so a trial's outcome does not
//! depend on which worker runs it. Trials are folded in index order.

use bcj_core::bcjmap::{sigma_separating, SeparatingTwist};
use bcj_core::boolring::substitute_sp;
use bcj_core::cassonmorita::{
    epsilon, exhaustive_mu_check, rho_separating, selflink_eval, trial_rng, verify_trial,
    CheckOutcome, LinkingMatrix,
};
use bcj_core::surface::{random_integral_basis, random_symplectic_rebase, Genus, SpMatrix, SubsurfaceBasis};
use num_bigint::BigInt;
use rand::Rng;
use rayon::prelude::*;

use crate::error::CliError;

pub const CHECK_EQUIVARIANCE: &str = "equivariance: substitute_sp(M, sigma(S)) == sigma(M S)";
pub const CHECK_BASIS_INDEPENDENCE: &str = "basis independence: sigma(rebase(S)) == sigma(S)";
pub const CHECK_SUPPLIED_L: &str = "right square with the supplied linking matrix";

// trial streams for the suites below start past those used by the diagram checks
const SUITE_STREAM: u64 = 1 << 62;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusVerification {
    pub genus: u32,
    pub checks: Vec<CheckOutcome>,
}

impl GenusVerification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }
}

fn sigma(b: &SubsurfaceBasis) -> Result<bcj_core::boolring::BoolPoly, bcj_core::Error> {
    sigma_separating(&SeparatingTwist::new(b.clone(), "")?)
}

fn suite_trial(
    g: Genus,
    seed: u64,
    t: u64,
    supplied: Option<&LinkingMatrix>,
) -> Result<Vec<CheckOutcome>, bcj_core::Error> {
    let mut out = verify_trial(g, seed, t)?.checks;
    let mut rng = trial_rng(seed, SUITE_STREAM + t);
    let n = g.get() as usize;
    let h = rng.gen_range(1..=n);
    let handles: Vec<usize> = (1..=h).collect();
    let place = SpMatrix::random_word(g, 6, &mut rng);
    let basis = SubsurfaceBasis::standard(g, &handles).transform(&place)?;
    let s = sigma(&basis)?;

    let m = SpMatrix::random_word(g, rng.gen_range(1..8), &mut rng);
    let lhs = substitute_sp(&m, &s)?;
    let rhs = sigma(&basis.transform(&m)?)?;
    let mut eq = CheckOutcome::new(CHECK_EQUIVARIANCE);
    eq.record(lhs == rhs, || format!("trial {t}: {basis:?} under {m:?}: {lhs} vs {rhs}"));
    out.push(eq);

    let rebased = random_symplectic_rebase(&basis, rng.gen())?;
    let r = sigma(&rebased)?;
    let mut bi = CheckOutcome::new(CHECK_BASIS_INDEPENDENCE);
    bi.record(r == s, || format!("trial {t}: {basis:?} -> {rebased:?}: {s} vs {r}"));
    out.push(bi);

    if let Some(l) = supplied {
        let all: Vec<usize> = (1..=n).collect();
        let zb = random_integral_basis(g, &all, 4, &mut rng);
        let eps = epsilon(l, &rho_separating(&zb)?)?;
        let sl = selflink_eval(l, &sigma(&zb.reduce_mod2())?)?;
        let odd = &eps % BigInt::from(2) != BigInt::from(0);
        let mut sq = CheckOutcome::new(CHECK_SUPPLIED_L);
        sq.record(odd == sl, || format!("trial {t}: {zb:?}: eps {eps}, selflink {sl}"));
        out.push(sq);
    }
    Ok(out)
}

/// Runs every suite for `trials` trials on the given pool.
pub fn verify_genus(
    pool: &rayon::ThreadPool,
    g: Genus,
    trials: usize,
    seed: u64,
    supplied: Option<&LinkingMatrix>,
    exhaustive_mu: bool,
) -> Result<GenusVerification, CliError> {
    if let Some(l) = supplied {
        if l.genus() != g {
            return Err(CliError::Usage(format!(
                "linking matrix has genus {}, run uses genus {g}",
                l.genus()
            )));
        }
    }
    let per_trial: Vec<Vec<CheckOutcome>> = pool.install(|| {
        (0..trials as u64)
            .into_par_iter()
            .map(|t| suite_trial(g, seed, t, supplied))
            .collect::<Result<_, _>>()
    })?;
    let mut checks: Vec<CheckOutcome> = match per_trial.first() {
        Some(first) => first.iter().map(|c| CheckOutcome::new(&c.name)).collect(),
        None => suite_trial(g, seed, 0, supplied)?
            .iter()
            .map(|c| CheckOutcome::new(&c.name))
            .collect(),
    };
    for trial in &per_trial {
        for (acc, c) in checks.iter_mut().zip(trial) {
            acc.absorb(c);
        }
    }
    if exhaustive_mu {
        let mut ex = exhaustive_mu_check(g)?;
        ex.name = format!("{} (exhaustive over {} classes)", ex.name, 1u64 << g.rank());
        checks.push(ex);
    }
    Ok(GenusVerification {
        genus: g.get(),
        checks,
    })
}
