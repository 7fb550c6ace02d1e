//! Parameter sets behind each `figure` preset.
//!
//! Every parameter the figure caption or text states is encoded as given;
//! the rest are defaults listed in `assumptions` and copied into the manifest.

use fdssk_core::{EstimationErrorMode, SystemParams};

use crate::config::{grid, Method, Metric};

pub const PRESET_NAMES: [&str; 17] = [
    "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b", "fig6a", "fig6b", "fig7a", "fig7b", "fig8a", "fig8b",
    "fig9", "fig10a", "fig10b", "fig11a", "fig11b",
];

/// Realizations per simulated point unless overridden.
pub const DEFAULT_TRIALS: u64 = 1_000_000;

pub const HD_LABEL_NOTE: &str = "convention: equal-spectral-efficiency baseline";

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSpec {
    pub label: String,
    /// `snr_db` is ignored; the grid supplies it.
    pub params: SystemParams,
    pub metric: Metric,
    pub methods: Vec<Method>,
    pub gcq_order: usize,
    /// Emit |ABEP(Q) − ABEP(Q')| for this Q' instead of ABEP(Q).
    pub gcq_difference_from: Option<usize>,
}

impl SeriesSpec {
    fn new(label: impl Into<String>, params: SystemParams, metric: Metric, methods: &[Method]) -> Self {
        Self {
            label: label.into(),
            params,
            metric,
            methods: methods.to_vec(),
            gcq_order: fdssk_core::specfun::GcqRule::DEFAULT_ORDER,
            gcq_difference_from: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub snr_grid_db: Vec<f64>,
    pub series: Vec<SeriesSpec>,
    pub assumptions: Vec<String>,
}

use Method::{Asymptotic, Exact, Gcq, Sim, Upper};

fn link(n: usize, k2: f64, mode: EstimationErrorMode) -> SystemParams {
    SystemParams::new(n, 2).with_li_level(k2).with_err_mode(mode)
}

fn fixed(se2: f64) -> EstimationErrorMode {
    EstimationErrorMode::Fixed { sigma_e2: se2 }
}

fn pilots(t: u32) -> EstimationErrorMode {
    EstimationErrorMode::Variable { pilots: t }
}

const PERFECT: EstimationErrorMode = EstimationErrorMode::Perfect;

/// Half-duplex comparison link: no loop interference and `N_t²` antennas.
pub fn half_duplex(fd: SystemParams) -> SystemParams {
    SystemParams {
        li_level: 0.0,
        n_tx: fd.n_tx * fd.n_tx,
        ..fd
    }
}

fn hd_label(extra: &str) -> String {
    if extra.is_empty() {
        format!("HD ({HD_LABEL_NOTE})")
    } else {
        format!("HD {extra} ({HD_LABEL_NOTE})")
    }
}

fn gcq_sweep(name: &'static str, difference: bool) -> Preset {
    let base = link(100, 0.1, fixed(0.1));
    let first = if difference { 2 } else { 1 };
    let series = (first..=10)
        .map(|q| SeriesSpec {
            gcq_order: q,
            gcq_difference_from: difference.then(|| q - 1),
            ..SeriesSpec::new(format!("Q={q}"), base, Metric::Abep, &[Gcq])
        })
        .collect();
    Preset {
        name,
        description: if difference {
            "ABEP difference between adjacent GCQ orders, N=100, k^2=0.1, sigma_e^2=0.1"
        } else {
            "ABEP versus GCQ order, N=100, k^2=0.1, sigma_e^2=0.1"
        },
        snr_grid_db: vec![-25.0, -23.0, -21.0],
        series,
        assumptions: vec!["rows are grouped by Q in the label; snr_db selects the curve".into()],
    }
}

fn fixed_error_sweep(name: &'static str, n: usize) -> Preset {
    let mut series = vec![SeriesSpec::new("perfect CSI", link(n, 0.1, PERFECT), Metric::Abep, &[Sim])];
    for se2 in [0.01, 0.1, 1.0] {
        series.push(SeriesSpec::new(format!("sigma_e^2={se2}"), link(n, 0.1, fixed(se2)), Metric::Abep, &[Sim]));
    }
    Preset {
        name,
        description: "simulated ABEP for fixed sigma_e^2, N=25, k^2=0.1",
        snr_grid_db: grid(-30.0, 20.0, 2.0),
        series,
        assumptions: vec!["sigma_e^2 values 0.01, 0.1, 1 (not stated)".into(), "SNR grid -30..20 dB".into()],
    }
}

fn li_sweep(name: &'static str, n: usize) -> Preset {
    let mut series: Vec<SeriesSpec> = [0.3, 0.1, 0.01]
        .iter()
        .map(|&k2| SeriesSpec::new(format!("FD k^2={k2}"), link(n, k2, fixed(0.1)), Metric::Abep, &[Sim]))
        .collect();
    series.push(SeriesSpec::new(hd_label(""), half_duplex(link(n, 0.1, fixed(0.1))), Metric::Abep, &[Sim]));
    Preset {
        name,
        description: "simulated ABEP versus loop-interference level, FD against HD, sigma_e^2=0.1",
        snr_grid_db: grid(-20.0, 30.0, 2.0),
        series,
        assumptions: vec![
            "k^2 values 0.3, 0.1, 0.01 (not stated)".into(),
            format!("HD link: k^2=0 and N_t=4 ({HD_LABEL_NOTE})"),
            "SNR grid -20..30 dB".into(),
        ],
    }
}

fn outage_error_sweep(name: &'static str, variable: bool) -> Preset {
    let metric = Metric::Outage { rate_bps: 3.0 };
    let mut series = vec![SeriesSpec::new("perfect CSI", link(200, 0.1, PERFECT), metric, &[Sim, Exact])];
    if variable {
        for t in [1, 10, 100] {
            series.push(SeriesSpec::new(format!("T={t}"), link(200, 0.1, pilots(t)), metric, &[Sim, Exact]));
        }
    } else {
        for se2 in [0.1, 0.5, 1.0] {
            series.push(SeriesSpec::new(
                format!("sigma_e^2={se2}"),
                link(200, 0.1, fixed(se2)),
                metric,
                &[Sim, Exact, Asymptotic],
            ));
        }
    }
    Preset {
        name,
        description: if variable {
            "outage probability with pilot-dependent sigma_e^2, N=200, R=3"
        } else {
            "outage probability with fixed sigma_e^2, N=200, R=3"
        },
        snr_grid_db: if variable { grid(-50.0, 0.0, 1.0) } else { grid(-50.0, -20.0, 1.0) },
        series,
        assumptions: vec![
            "k^2=0.1 (not stated)".into(),
            if variable { "pilot counts T = 1, 10, 100 (not stated)".into() } else { "sigma_e^2 values 0.1, 0.5, 1 (not stated)".into() },
            if variable { "SNR grid -50..0 dB".into() } else { "SNR grid -50..-20 dB".into() },
        ],
    }
}

pub fn preset(name: &str) -> Option<Preset> {
    let p = match name {
        "fig3a" => gcq_sweep("fig3a", true),
        "fig3b" => gcq_sweep("fig3b", false),
        "fig4a" => Preset {
            name: "fig4a",
            description: "ABEP versus N, simulation against the CLT analysis, k^2=0.1, sigma_e^2=0.1",
            snr_grid_db: grid(-40.0, 10.0, 2.0),
            series: [9, 25, 64, 100, 256]
                .iter()
                .map(|&n| SeriesSpec::new(format!("N={n}"), link(n, 0.1, fixed(0.1)), Metric::Abep, &[Sim, Exact]))
                .collect(),
            assumptions: vec!["N values 9, 25, 64, 100, 256 (range 9..256 stated)".into(), "SNR grid -40..10 dB".into()],
        },
        "fig4b" => Preset {
            name: "fig4b",
            description: "simulation, exact, upper bound and asymptote, N=256, k^2=0.1, sigma_e^2=2",
            snr_grid_db: grid(-30.0, 30.0, 2.0),
            series: vec![SeriesSpec::new(
                "N=256",
                link(256, 0.1, fixed(2.0)),
                Metric::Abep,
                &[Sim, Exact, Upper, Asymptotic],
            )],
            assumptions: vec!["N=256 (not stated; same array as fig5b)".into(), "SNR grid -30..30 dB".into()],
        },
        "fig5a" => fixed_error_sweep("fig5a", 25),
        "fig5b" => {
            let mut series: Vec<SeriesSpec> = [3.0, 2.0, 1.0]
                .iter()
                .map(|&se2| {
                    SeriesSpec::new(format!("sigma_e^2={se2}"), link(256, 0.1, fixed(se2)), Metric::Abep, &[Sim, Exact, Asymptotic])
                })
                .collect();
            series.push(SeriesSpec::new("perfect CSI", link(256, 0.1, PERFECT), Metric::Abep, &[Sim, Exact]));
            Preset {
                name: "fig5b",
                description: "ABEP for fixed sigma_e^2 in {1,2,3} with error floors, N=256, k^2=0.1",
                snr_grid_db: grid(-30.0, 30.0, 2.0),
                series,
                assumptions: vec!["SNR grid -30..30 dB".into()],
            }
        }
        "fig6a" => {
            let mut series = vec![SeriesSpec::new("perfect CSI", link(25, 0.1, PERFECT), Metric::Abep, &[Sim])];
            for t in [1, 10, 100] {
                series.push(SeriesSpec::new(format!("T={t}"), link(25, 0.1, pilots(t)), Metric::Abep, &[Sim]));
            }
            Preset {
                name: "fig6a",
                description: "simulated ABEP with sigma_e^2 = 1/(T rho), N=25, k^2=0.1",
                snr_grid_db: grid(-30.0, 20.0, 2.0),
                series,
                assumptions: vec!["pilot counts T = 1, 10, 100 (not stated)".into(), "SNR grid -30..20 dB".into()],
            }
        }
        "fig6b" => {
            let mut series = vec![SeriesSpec::new("perfect CSI", link(256, 0.1, PERFECT), Metric::Abep, &[Sim, Exact])];
            for t in [10, 100, 1000] {
                series.push(SeriesSpec::new(format!("T={t}"), link(256, 0.1, pilots(t)), Metric::Abep, &[Sim, Exact]));
            }
            Preset {
                name: "fig6b",
                description: "ABEP with sigma_e^2 = 1/(T rho), N=256, k^2=0.1",
                snr_grid_db: grid(-40.0, 10.0, 2.0),
                series,
                assumptions: vec!["pilot counts T = 10, 100, 1000 (not stated)".into(), "SNR grid -40..10 dB".into()],
            }
        }
        "fig7a" => li_sweep("fig7a", 9),
        "fig7b" => li_sweep("fig7b", 16),
        "fig8a" => {
            let fd = link(400, 0.3, fixed(0.1));
            Preset {
                name: "fig8a",
                description: "FD against HD with fixed sigma_e^2, N=400, k^2=0.3",
                snr_grid_db: grid(-50.0, -34.0, 2.0),
                series: vec![
                    SeriesSpec::new("FD", fd, Metric::Abep, &[Sim, Exact]),
                    SeriesSpec::new("FD perfect CSI", link(400, 0.3, PERFECT), Metric::Abep, &[Exact]),
                    SeriesSpec::new(hd_label(""), half_duplex(fd), Metric::Abep, &[Sim, Exact]),
                ],
                assumptions: vec![
                    "sigma_e^2=0.1 fixed (not stated)".into(),
                    format!("HD link: k^2=0 and N_t=4 ({HD_LABEL_NOTE}); its exact curve is the union bound"),
                    "SNR grid -50..-34 dB; the FD and HD simulations cross near -36 dB".into(),
                ],
            }
        }
        "fig8b" => {
            let mut series = Vec::new();
            for t in [10, 100] {
                series.push(SeriesSpec::new(format!("FD T={t}"), link(400, 0.3, pilots(t)), Metric::Abep, &[Sim, Exact]));
            }
            series.push(SeriesSpec::new("FD perfect CSI", link(400, 0.3, PERFECT), Metric::Abep, &[Exact]));
            series.push(SeriesSpec::new(
                hd_label("T=10"),
                half_duplex(link(400, 0.3, pilots(10))),
                Metric::Abep,
                &[Sim, Exact],
            ));
            Preset {
                name: "fig8b",
                description: "FD against HD with sigma_e^2 = 1/(T rho), N=400, k^2=0.3",
                snr_grid_db: grid(-40.0, 0.0, 2.0),
                series,
                assumptions: vec![
                    "pilot counts T = 10, 100 (not stated)".into(),
                    format!("HD link: k^2=0 and N_t=4 ({HD_LABEL_NOTE}); its exact curve is the union bound"),
                    "SNR grid -40..0 dB".into(),
                ],
            }
        }
        "fig9" => {
            let mut series = Vec::new();
            for rate in [3.0, 5.0] {
                for n in [50, 100] {
                    series.push(SeriesSpec::new(
                        format!("N={n}, R={rate}"),
                        link(n, 0.1, fixed(0.1)),
                        Metric::Outage { rate_bps: rate },
                        &[Sim, Exact],
                    ));
                }
            }
            Preset {
                name: "fig9",
                description: "outage probability versus N and target rate R",
                snr_grid_db: grid(-40.0, -15.0, 1.0),
                series,
                assumptions: vec![
                    "sigma_e^2 mode unstated; Fixed(0.1)".into(),
                    "k^2=0.1 (not stated)".into(),
                    "SNR grid -40..-15 dB".into(),
                ],
            }
        }
        "fig10a" => outage_error_sweep("fig10a", false),
        "fig10b" => outage_error_sweep("fig10b", true),
        "fig11a" => Preset {
            name: "fig11a",
            description: "throughput versus N, sigma_e^2=1",
            snr_grid_db: grid(-40.0, 10.0, 2.0),
            series: [49, 100, 196]
                .iter()
                .map(|&n| SeriesSpec::new(format!("N={n}"), link(n, 0.1, fixed(1.0)), Metric::Throughput, &[Sim, Exact]))
                .collect(),
            assumptions: vec!["k^2=0.1 (not stated)".into(), "SNR grid -40..10 dB".into()],
        },
        "fig11b" => Preset {
            name: "fig11b",
            description: "throughput versus N_t, N=100, sigma_e^2=1",
            snr_grid_db: grid(-40.0, 10.0, 2.0),
            series: [2, 4, 8]
                .iter()
                .map(|&nt| {
                    let p = SystemParams { n_tx: nt, ..link(100, 0.1, fixed(1.0)) };
                    SeriesSpec::new(format!("N_t={nt}"), p, Metric::Throughput, &[Sim, Exact])
                })
                .collect(),
            assumptions: vec![
                "N_t values 2, 4, 8 (not stated)".into(),
                "k^2=0.1 (not stated)".into(),
                "for N_t > 2 the exact curve uses the union bound".into(),
                "SNR grid -40..10 dB".into(),
            ],
        },
        _ => return None,
    };
    Some(p)
}
