use conelink::sim::{run, ControllerKind, DisturbanceSpec, NoiseSpec, Scenario};
use conelink::{AxisGains, GainSchedule};

struct Summary {
    rmse_x: f64,
    rmse_y: f64,
    max_d30: f64,
    t_a: Option<f64>,
    dt: Option<f64>,
    max_v_rise: f64,
}

fn summarize(scenario: &Scenario) -> Summary {
    let record = run(scenario).unwrap();
    let max_d30 = record
        .rows
        .iter()
        .filter(|r| r.t >= 30.0)
        .map(|r| r.distance)
        .fold(0.0f64, f64::max);
    let mut max_v_rise = 0.0f64;
    for w in record.rows.windows(2) {
        let rise = (w[1].lyapunov - w[0].lyapunov) / (1.0 + w[0].lyapunov);
        if rise > max_v_rise {
            max_v_rise = rise;
        }
    }
    Summary {
        rmse_x: record.metrics.rmse_x.unwrap(),
        rmse_y: record.metrics.rmse_y.unwrap(),
        max_d30,
        t_a: record.metrics.cone_arrival_time,
        dt: record.metrics.restoring_time,
        max_v_rise,
    }
}

fn scenario(controller: ControllerKind, case: u8) -> Scenario {
    let mut s = Scenario::default();
    s.controller = controller;
    s.rmse_window = Some((5.0, 150.0));
    if case >= 1 {
        s.disturbance = Some(DisturbanceSpec::default());
        s.noise = Some(NoiseSpec::default());
    }
    if case == 2 {
        s.mass_scale = 1.2;
    }
    s
}

fn main() {
    let pd = ControllerKind::Pd {
        kp: 300.0,
        kv: 250.0,
    };
    let pd_nom = summarize(&scenario(pd.clone(), 0));
    let pd_c1 = summarize(&scenario(pd.clone(), 1));
    let pd_c2 = summarize(&scenario(pd.clone(), 2));
    println!(
        "PD    nominal rmse=({:.4},{:.4}) c1=({:.4},{:.4}) c2=({:.4},{:.4}) maxd30 c1={:.3} t_a={:?} dt={:?}",
        pd_nom.rmse_x, pd_nom.rmse_y, pd_c1.rmse_x, pd_c1.rmse_y, pd_c2.rmse_x, pd_c2.rmse_y,
        pd_c1.max_d30, pd_nom.t_a, pd_c1.dt
    );

    let candidates = [
        (600.0, 0.05, 0.5, 250.0, 0.05, 0.5),
        (600.0, 0.05, 0.5, 300.0, 0.05, 0.5),
        (900.0, 0.05, 0.5, 250.0, 0.05, 0.5),
        (900.0, 0.05, 0.5, 300.0, 0.05, 0.5),
        (900.0, 0.05, 0.5, 350.0, 0.05, 0.5),
        (900.0, 0.02, 0.5, 300.0, 0.05, 0.5),
        (1200.0, 0.05, 0.5, 300.0, 0.05, 0.5),
        (900.0, 0.05, 0.4, 300.0, 0.05, 0.5),
    ];
    for (a_p, b_p, mu_p, a_v, b_v, mu_v) in candidates {
        let gains = AxisGains {
            a_p,
            b_p,
            mu_p,
            a_v,
            b_v,
            mu_v,
        };
        let schedule = GainSchedule {
            x: gains,
            y: gains,
            yaw: AxisGains::constant(300.0, 250.0),
        };
        let nlpd = ControllerKind::Nlpd { schedule };
        let nom = summarize(&scenario(nlpd.clone(), 0));
        let c1 = summarize(&scenario(nlpd.clone(), 1));
        let c2 = summarize(&scenario(nlpd.clone(), 2));
        let imp = |pd: f64, nl: f64| 100.0 * (pd - nl) / pd;
        println!(
            "a_p={a_p:6} b_p={b_p} mu={mu_p} a_v={a_v:5} b_v={b_v}: nom=({:+5.1}%,{:+5.1}%) c1=({:+5.1}%,{:+5.1}%) c2=({:+5.1}%,{:+5.1}%) maxd30={:.3} t_a={:?} dt={:?} Vrise={:.2e}",
            imp(pd_nom.rmse_x, nom.rmse_x),
            imp(pd_nom.rmse_y, nom.rmse_y),
            imp(pd_c1.rmse_x, c1.rmse_x),
            imp(pd_c1.rmse_y, c1.rmse_y),
            imp(pd_c2.rmse_x, c2.rmse_x),
            imp(pd_c2.rmse_y, c2.rmse_y),
            c1.max_d30,
            nom.t_a,
            c1.dt,
            nom.max_v_rise,
        );
    }
}
