use rand::Rng;

use super::{type_of, InfectionMap, RunOutcome, StopRule, Termination, Tracker};
use crate::error::{config_err, Result};
use crate::lattice::{Domain, Point, SeedConfig, MAX_DIM};

/// Event-driven Markov simulation: each susceptible site is taken by type
/// i at rate λ_i times its number of type-i neighbours. Randomness comes
/// from `rng` only, so this agrees with [`super::run_two_type`] in law but
/// not pathwise.
pub fn run_two_type_markov<R: Rng>(
    domain: &Domain,
    cfg: &SeedConfig,
    lambda1: f64,
    lambda2: f64,
    rng: &mut R,
    stop: &StopRule,
) -> Result<(InfectionMap, RunOutcome)> {
    if cfg.dim != domain.dim() {
        return Err(config_err!("seed configuration is {}-dimensional, domain {}", cfg.dim, domain.dim()));
    }
    let (one, two) = cfg.enumerate()?;
    run_two_type_markov_seeds(domain, &one, &two, lambda1, lambda2, rng, stop)
}

pub fn run_two_type_markov_seeds<R: Rng>(
    domain: &Domain,
    type1: &[Point],
    type2: &[Point],
    lambda1: f64,
    lambda2: f64,
    rng: &mut R,
    stop: &StopRule,
) -> Result<(InfectionMap, RunOutcome)> {
    for (i, l) in [lambda1, lambda2].into_iter().enumerate() {
        if !(l > 0.0 && l.is_finite()) {
            return Err(config_err!("lambda{} must satisfy lambda > 0, got {l}", i + 1));
        }
    }
    let rates = [lambda1, lambda2];
    let mut tr = Tracker::new(domain, stop)?;
    tr.seed(type1, type2)?;
    let horizon = stop.horizon.unwrap_or(f64::INFINITY);
    let dim = domain.dim();
    let fan = 2 * dim;
    // slot[site * fan + code] = 1 + position of the bond entering `site`
    // from direction `code`, or 0
    let mut slot = vec![0u32; domain.volume() * fan];
    // active (infected -> susceptible) bonds per type as (susceptible site,
    // direction of the infected end)
    let mut lists: [Vec<(usize, u8)>; 2] = [Vec::new(), Vec::new()];
    let mut coords = [0i32; MAX_DIM];

    let mut attach = |tr: &Tracker, lists: &mut [Vec<(usize, u8)>; 2], slot: &mut [u32], site: usize| {
        let k = tr.map.state[site] as usize - 1;
        domain.decode(site, &mut coords);
        for code in 0..fan {
            let Some(m) = domain.step(site, &coords, code) else {
                continue;
            };
            let back = code ^ 1;
            if tr.is_susceptible(m) {
                lists[k].push((m, back as u8));
                slot[m * fan + back] = lists[k].len() as u32;
            } else {
                // bond into `site` from `m`
                let pos = std::mem::take(&mut slot[site * fan + code]);
                if pos > 0 {
                    let list = &mut lists[tr.map.state[m] as usize - 1];
                    list.swap_remove(pos as usize - 1);
                    if let Some(&(s, c)) = list.get(pos as usize - 1) {
                        slot[s * fan + c as usize] = pos;
                    }
                }
            }
        }
    };

    for k in 0..tr.map.order.len() {
        let site = tr.map.order[k];
        attach(&tr, &mut lists, &mut slot, site);
    }
    let mut t = 0.0;
    let termination = match tr.check() {
        Some(end) => end,
        None => loop {
            let n = [lists[0].len() as f64, lists[1].len() as f64];
            let total = rates[0] * n[0] + rates[1] * n[1];
            if total == 0.0 {
                break Termination::Exhausted;
            }
            let u: f64 = rng.random();
            t += -(1.0 - u).ln() / total;
            if t > horizon {
                break Termination::Horizon;
            }
            let k = if rng.random::<f64>() * total < rates[0] * n[0] { 0 } else { 1 };
            let pick = rng.random_range(0..lists[k].len());
            let (site, code) = lists[k][pick];
            tr.infect(site, type_of(k as u8 + 1), t, code);
            attach(&tr, &mut lists, &mut slot, site);
            debug_assert_eq!(tr.bonds, [lists[0].len() as u64, lists[1].len() as u64]);
            if let Some(end) = tr.check() {
                break end;
            }
        },
    };
    Ok(tr.finish(termination))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::SeedRegion;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn audit_and_full_cover() {
        let dom = Domain::cube(2, 8).unwrap();
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (map, out) = run_two_type_markov(
                &dom,
                &SeedConfig::half_axis(2, 8),
                1.0,
                2.0,
                &mut rng,
                &crate::competition::StopRule::exhaust(),
            )
            .unwrap();
            map.audit().unwrap();
            assert_eq!(map.len(), dom.volume());
            assert_eq!(out.termination, Termination::Exhausted);
        }
    }

    #[test]
    fn axis_mean_in_a_thin_tube() {
        // on the b=0 tube the time to reach n is a sum of n Exp(λ)
        let dom = Domain::tube(2, 0, 0, 10).unwrap();
        let reps = 4000;
        let mut sum = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = SeedConfig::new(2, SeedRegion::Origin, SeedRegion::Empty);
        for _ in 0..reps {
            let (map, _) = run_two_type_markov(&dom, &cfg, 2.0, 1.0, &mut rng, &StopRule::exhaust()).unwrap();
            sum += map.time(&Point::on_axis(2, 10).unwrap()).unwrap();
        }
        let mean = sum / reps as f64;
        // sd of the mean = sqrt(10)/2/sqrt(4000) ≈ 0.025
        assert!((mean - 5.0).abs() < 0.1, "mean {mean}");
    }
}
