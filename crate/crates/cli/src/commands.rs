use dressed_core::amplitudes::{cavity_survival_series, f00_closed, f00_discrete, f00_quadrature, solve_delta_max};
use dressed_core::spectrum::{approx_small_l_spectrum, solve_cavity_spectrum, solve_finite_spectrum};
use dressed_core::transform::{small_l_weights, CavityWeights, SmallLRegime};
use dressed_core::{
    cavity_min_bound, classical_path, cross_validate, Amplitudes, CoherentPreparation, Modes, NormalModeSet,
    SpectrumSource,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{num, CurveOutput};
use crate::{Method, Options, Regime, Route};

fn regime_of(r: Regime) -> SmallLRegime {
    match r {
        Regime::Weak => SmallLRegime::Weak,
        Regime::Strong => SmallLRegime::Strong,
    }
}

/// Frequencies and particle weights for the selected route.
fn route_modes(cfg: &RunConfig, opts: &Options, route: Route) -> Result<Modes, CliError> {
    let spec = &cfg.spec;
    Ok(match route {
        Route::FiniteN => solve_finite_spectrum(spec)?,
        Route::Cavity => solve_cavity_spectrum(spec, cfg.k_max, opts.cavity_variant.into())?,
        Route::SmallL => {
            let s = approx_small_l_spectrum(spec, cfg.k_max)?;
            let w = small_l_weights(spec, regime_of(opts.regime), cfg.k_max)?;
            NormalModeSet::from_parts(*spec, s.frequencies(), w.all(), SpectrumSource::SmallLAsymptotic)?
        }
    })
}

fn route_meta(out: &mut CurveOutput, cfg: &RunConfig, opts: &Options, route: Route) {
    out.meta("route", route.as_str());
    match route {
        Route::FiniteN => {}
        Route::Cavity => {
            out.meta("k_max", cfg.k_max.to_string());
            out.meta("cavity_variant", opts.cavity_variant.as_str());
        }
        Route::SmallL => {
            out.meta("k_max", cfg.k_max.to_string());
            out.meta("coupling_regime", opts.regime.as_str());
        }
    }
}

fn grid_meta(out: &mut CurveOutput, cfg: &RunConfig) {
    out.meta("t_max", num(cfg.t_max));
    out.meta("samples", cfg.samples.to_string());
}

pub fn spectrum(cfg: &RunConfig, opts: &Options) -> Result<CurveOutput, CliError> {
    let route = opts.route.unwrap_or(Route::FiniteN);
    let modes = route_modes(cfg, opts, route)?;
    let mut out = CurveOutput::new("spectrum", &cfg.spec, vec!["r", "Omega_r", "weight_r"]);
    route_meta(&mut out, cfg, opts, route);
    for (r, (&om, &w)) in modes.frequencies().iter().zip(modes.weights()).enumerate() {
        out.push(vec![r.to_string(), num(om), num(w)]);
    }
    Ok(out)
}

fn amplitudes(cfg: &RunConfig, opts: &Options, out: &mut CurveOutput) -> Result<Amplitudes, CliError> {
    let times = cfg.times();
    let method = opts.method.unwrap_or(Method::Closed);
    out.meta("method", method.as_str());
    grid_meta(out, cfg);
    Ok(match method {
        Method::Closed => f00_closed(&cfg.spec, &times)?,
        Method::Quadrature => f00_quadrature(&cfg.spec, &times)?,
        Method::Discrete => {
            let route = opts.route.unwrap_or(Route::FiniteN);
            route_meta(out, cfg, opts, route);
            let modes = route_modes(cfg, opts, route)?;
            f00_discrete(&modes, modes.weights(), &times)?
        }
    })
}

pub fn decay(cfg: &RunConfig, opts: &Options) -> Result<CurveOutput, CliError> {
    let mut out = CurveOutput::new("decay", &cfg.spec, vec!["t", "re_f00", "im_f00", "prob"]);
    let series = amplitudes(cfg, opts, &mut out)?;
    for (&t, v) in series.times.iter().zip(&series.values) {
        out.push(vec![num(t), num(v.re), num(v.im), num(v.norm_sqr())]);
    }
    Ok(out)
}

pub fn brownian(cfg: &RunConfig, opts: &Options) -> Result<CurveOutput, CliError> {
    let prep = CoherentPreparation::new(opts.n_bar, opts.theta)?;
    let mut out = CurveOutput::new("brownian", &cfg.spec, vec!["t", "position"]);
    out.meta("n_bar", num(opts.n_bar));
    out.meta("theta", num(opts.theta));
    let series = amplitudes(cfg, opts, &mut out)?;
    let path = classical_path(&cfg.spec, &prep, &series.times, &series)?;
    for (&t, &q) in series.times.iter().zip(&path) {
        out.push(vec![num(t), num(q)]);
    }
    Ok(out)
}

pub fn cavity(cfg: &RunConfig, opts: &Options) -> Result<CurveOutput, CliError> {
    let route = opts.route.unwrap_or(Route::Cavity);
    if route == Route::FiniteN {
        return Err(CliError::Input("cavity needs --route cavity or --route small-l".into()));
    }
    let modes = route_modes(cfg, opts, route)?;
    let w = modes.weights();
    let weights = CavityWeights { ground: w[0], excited: w[1..].to_vec() };
    let times = cfg.times();
    let probs = cavity_survival_series(&weights, modes.frequencies(), &times)?;

    let mut out = CurveOutput::new("cavity", &cfg.spec, vec!["t", "prob"]);
    route_meta(&mut out, cfg, opts, route);
    grid_meta(&mut out, cfg);
    let d = cfg.spec.derived();
    out.meta("cavity_delta", num(d.delta));
    let (i_min, p_min) =
        probs.iter().enumerate().fold((0, f64::INFINITY), |b, (i, &p)| if p < b.1 { (i, p) } else { b });
    out.meta("grid_min", num(p_min));
    out.meta("grid_min_t", num(times[i_min]));
    let bound = cavity_min_bound(d.delta, regime_of(opts.regime))?;
    out.meta("bound_regime", opts.regime.as_str());
    out.meta("analytic_min_bound", num(bound.min_probability));
    if opts.regime == Regime::Strong {
        let delta_max: f64 = solve_delta_max()?;
        out.meta("delta_max", num(delta_max));
        out.meta("L_max", num(2.0 * cfg.spec.light_speed() * delta_max / cfg.spec.g()));
        if bound.unphysical || d.delta > delta_max {
            out.meta("status", "unphysical: exceeds delta_max");
        } else {
            out.meta("status", "ok");
        }
    }
    for (&t, &p) in times.iter().zip(&probs) {
        out.push(vec![num(t), num(p)]);
    }
    Ok(out)
}

/// Returns the report text and the number of failed checks.
pub fn validate(cfg: &RunConfig) -> (String, usize) {
    let report = cross_validate(&cfg.spec);
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    (report.to_text(), failed)
}
