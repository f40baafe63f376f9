//! Built-in scenarios: the published two-dimensional experiments.
//!
//! Values not given with the experiments are artifact defaults: `alpha = 1`
//! and `f(u) = phi(u) = u` throughout (consistent with the stated
//! `vbar = ubar`), unit squares where no domain is printed, `chi = 10` for
//! fig6_iii, a doubled side for fig6_iv, 128 cells per unit length (64 for
//! fig5), horizon 200, and seeded noise of amplitude 0.01 for fig4.

use super::config::{parse_config, ScenarioConfig};

const COMMON_RUN: &str = "run.t_max = 200\n";

fn model(d1: f64, d2: f64, chi: f64, mu: f64, ubar: f64) -> String {
    format!(
        "model.d1 = {d1}\nmodel.d2 = {d2}\nmodel.chi = {chi}\nmodel.mu = {mu}\nmodel.ubar = {ubar}\n\
         model.alpha = 1\nmodel.phi = linear\nmodel.f = linear\n"
    )
}

fn square(side: f64, cells: usize) -> String {
    format!("domain.kind = rectangle\ndomain.lx = {side}\ndomain.ly = {side}\ngrid.nx = {cells}\ngrid.ny = {cells}\n")
}

fn fig2() -> String {
    format!(
        "name = fig2\n{}{}\
         init.kind = expression\n\
         init.u.base = ubar\ninit.u.shape = cosine\ninit.u.amp = 1\ninit.u.kx = 2pi\ninit.u.ky = pi\n\
         init.v.base = vbar\ninit.v.shape = cosine\ninit.v.amp = 1\ninit.v.kx = pi\ninit.v.ky = pi\n{COMMON_RUN}",
        model(5.0, 0.01, 5.0, 1.0, 3.0),
        square(1.0, 128)
    )
}

fn fig3() -> String {
    format!(
        "name = fig3\n{}{}\
         init.kind = expression\n\
         init.u.base = ubar\ninit.u.shape = gaussian\ninit.u.amp = 1\ninit.u.width = 1\n\
         init.v.base = 2ubar\ninit.v.shape = cosine\ninit.v.amp = 0.01\ninit.v.kx = 1\n\
         {COMMON_RUN}output.times = 3, 18\n",
        model(0.0625, 1.0, 19.0, 8.0, 1.0),
        square(1.0, 128)
    )
}

fn fig4(tag: char, d2: f64, chi: f64) -> String {
    format!(
        "name = fig4{tag}\n{}{}\
         init.kind = white_noise\ninit.amp = 0.01\ninit.seed = 4\n{COMMON_RUN}",
        model(1.0, d2, chi, 10.0, 3.0),
        square(1.0, 128)
    )
}

fn fig5(l: u32) -> String {
    format!(
        "name = fig5_L{l}\n{}{}\
         init.kind = expression\n\
         init.u.base = ubar\ninit.u.shape = cosine\ninit.u.amp = 1\ninit.u.kx = 2\ninit.u.px = 1\ninit.u.ky = 2\ninit.u.py = 1\n\
         init.v.base = vbar\ninit.v.shape = cosine\ninit.v.amp = 1\ninit.v.kx = 2\ninit.v.ky = 2\n{COMMON_RUN}",
        model(5.0, 0.1, 5.0, 1.0, 3.0),
        square(l as f64, 64 * l as usize)
    )
}

fn fig6(tag: &str, params: (f64, f64, f64, f64, f64), side: f64) -> String {
    let (d1, d2, chi, mu, ubar) = params;
    format!(
        "name = fig6_{tag}\n{}{}\
         init.kind = expression\n\
         init.u.base = ubar\ninit.u.shape = gaussian\ninit.u.amp = 0.05\ninit.u.width = 2\n\
         init.v.base = vbar\ninit.v.shape = gaussian\ninit.v.amp = 0.05\ninit.v.width = 2\n{COMMON_RUN}",
        model(d1, d2, chi, mu, ubar),
        square(side, (128.0 * side) as usize)
    )
}

/// Scenario files of every built-in entry, in catalog order.
pub fn catalog_texts() -> Vec<String> {
    let i = (0.25, 0.25, 10.0, 5.0, 3.0);
    let ii = (0.125, 0.5, 10.0, 5.0, 3.0);
    let iii = (0.0625, 1.0, 10.0, 6.0, 1.0);
    vec![
        fig2(),
        fig3(),
        fig4('a', 0.1, 5.0),
        fig4('b', 0.1, 20.0),
        fig4('c', 0.005, 5.0),
        fig5(2),
        fig5(4),
        fig5(10),
        fig5(15),
        fig6("i", i, 1.0),
        fig6("ii", ii, 1.0),
        fig6("iii", iii, 1.0),
        fig6("iv", iii, 2.0),
    ]
}

/// Every built-in scenario, in catalog order.
pub fn scenario_catalog() -> Vec<ScenarioConfig> {
    catalog_texts()
        .iter()
        .map(|t| parse_config(t).expect("catalog entries are valid"))
        .collect()
}

pub fn catalog_entry(name: &str) -> Option<ScenarioConfig> {
    scenario_catalog().into_iter().find(|c| c.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenbasis::Domain;
    use crate::harness::config::{emit, InitSpec, Level, Shape};
    use std::f64::consts::PI;

    #[test]
    fn thirteen_named_entries() {
        let names: Vec<String> = scenario_catalog().into_iter().map(|c| c.name).collect();
        assert_eq!(
            names,
            [
                "fig2", "fig3", "fig4a", "fig4b", "fig4c", "fig5_L2", "fig5_L4", "fig5_L10", "fig5_L15", "fig6_i",
                "fig6_ii", "fig6_iii", "fig6_iv"
            ]
        );
    }

    #[test]
    fn every_entry_round_trips() {
        for c in scenario_catalog() {
            assert_eq!(parse_config(&emit(&c)).unwrap(), c, "{}", c.name);
        }
    }

    #[test]
    fn fig2_transcription() {
        let c = catalog_entry("fig2").unwrap();
        let p = c.model;
        assert_eq!((p.d1(), p.chi(), p.d2(), p.ubar(), p.mu()), (5.0, 5.0, 0.01, 3.0, 1.0));
        assert_eq!(c.domain, Domain::square(1.0).unwrap());
        assert_eq!((c.nx, c.ny, c.run.t_max), (128, 128, 200.0));
        let InitSpec::Expression { u, v } = c.init else { panic!("fig2 uses expressions") };
        assert_eq!(u.base, Level::ubar());
        assert_eq!(u.shape, Shape::Cosine { amp: 1.0, kx: 2.0 * PI, px: 0.0, ky: PI, py: 0.0 });
        assert_eq!(v.base, Level::vbar());
        assert_eq!(v.shape, Shape::Cosine { amp: 1.0, kx: PI, px: 0.0, ky: PI, py: 0.0 });
    }

    #[test]
    fn other_transcriptions() {
        let get = |n: &str| catalog_entry(n).unwrap();
        let p = get("fig3").model;
        assert_eq!((p.d1(), p.d2(), p.chi(), p.mu(), p.ubar()), (0.0625, 1.0, 19.0, 8.0, 1.0));
        let InitSpec::Expression { v, .. } = get("fig3").init else { panic!() };
        assert_eq!(v.base.resolve(&p), 2.0);
        for (n, d2, chi) in [("fig4a", 0.1, 5.0), ("fig4b", 0.1, 20.0), ("fig4c", 0.005, 5.0)] {
            let p = get(n).model;
            assert_eq!((p.d1(), p.mu(), p.ubar(), p.homogeneous_state().1), (1.0, 10.0, 3.0, 3.0));
            assert_eq!((p.d2(), p.chi()), (d2, chi));
            assert!(matches!(get(n).init, InitSpec::WhiteNoise { .. }));
        }
        for l in [2.0, 4.0, 10.0, 15.0] {
            let c = get(&format!("fig5_L{l}"));
            assert_eq!(c.domain, Domain::square(l).unwrap());
            let p = c.model;
            assert_eq!((p.d1(), p.chi(), p.d2(), p.mu(), p.ubar()), (5.0, 5.0, 0.1, 1.0, 3.0));
        }
        let p = get("fig6_ii").model;
        assert_eq!((p.d1(), p.d2(), p.mu(), p.ubar(), p.chi()), (0.125, 0.5, 5.0, 3.0, 10.0));
        assert_eq!(get("fig6_iv").model, get("fig6_iii").model);
        assert_eq!(get("fig6_iv").domain, Domain::square(2.0).unwrap());
        assert_eq!(get("fig6_iv").nx, 256);
    }
}
