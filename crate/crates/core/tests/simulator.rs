use epigraph_core::graph::{DetectionType, EvolvingGraph, Gender, Orientation, State, VertexLabel};
use epigraph_core::rng;
use epigraph_core::sim::{
    self, detection_rate, EventKind, HivRates, Proposal, SimConfig, Simulation, Theta,
    TracingWindow,
};
use proptest::prelude::*;

const WINDOW: TracingWindow = TracingWindow {
    eta1: 720.0,
    eta2: 180.0,
};

fn label(gender: Gender) -> VertexLabel {
    VertexLabel::susceptible(gender, Orientation::Hetero, 3)
}

/// Infective 0 and 1 (men) with partners: 2 detected inside the window for
/// days in [-120, 420], 3 detected long ago, 4 and 5 susceptible women.
fn frozen_state() -> EvolvingGraph {
    let genders = [
        Gender::Male,
        Gender::Male,
        Gender::Female,
        Gender::Female,
        Gender::Female,
        Gender::Female,
    ];
    let mut g = EvolvingGraph::from_labels(genders.iter().map(|&x| label(x)).collect()).unwrap();
    for v in [0, 1, 2, 3] {
        g.infect(v, -2000.0).unwrap();
    }
    for (a, b) in [(0, 2), (0, 3), (1, 2), (1, 4), (0, 5)] {
        g.add_contact_edge(a, b, -1500.0).unwrap();
    }
    g.detect(3, -1000.0, DetectionType::Random).unwrap();
    g.detect(2, -300.0, DetectionType::ContactTraced).unwrap();
    g
}

fn rates() -> HivRates {
    HivRates {
        lambda: 0.1,
        sigma: 0.5,
        gamma: 0.05,
        beta: 0.2,
    }
}

fn ks_exponential(samples: &mut [f64], rate: f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-rate * x).exp();
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn thinning_waits_are_exponential_with_exact_rate() {
    let sim = Simulation::new(frozen_state(), rates(), 0.5, 0.5, WINDOW, 0.0, 1e9);
    let total = sim.exact_total_rate(0.0);
    // 2 infectives: contacts 0.2, random 0.1, traced: vertex 0 and 1 each see 2
    assert!((total - (0.2 + 0.1 + 0.4)).abs() < 1e-12);
    assert!(sim.rate_bound() > total);

    let mut rng = rng::stream(11, 0);
    let n = 10_000;
    let mut waits = Vec::with_capacity(n);
    let (mut contacts, mut random, mut traced) = (0usize, 0usize, 0usize);
    for _ in 0..n {
        let mut t = 0.0;
        loop {
            let (day, proposal) = sim.propose(t, &mut rng);
            assert!(day <= 420.0, "left the frozen period");
            t = day;
            match proposal {
                Proposal::Null => continue,
                Proposal::Contact(_) => contacts += 1,
                Proposal::Detection { traced: false, .. } => random += 1,
                Proposal::Detection { traced: true, .. } => traced += 1,
            }
            break;
        }
        waits.push(t);
    }
    let d = ks_exponential(&mut waits, total);
    assert!(d < 1.628 / (n as f64).sqrt(), "KS statistic {d}");

    for (count, rate) in [(contacts, 0.2), (random, 0.1), (traced, 0.4)] {
        let p = rate / total;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        let freq = count as f64 / n as f64;
        assert!((freq - p).abs() < 3.0 * se, "freq {freq} vs {p}");
    }
}

#[test]
fn lone_infective_with_no_contacts_is_detected_at_rate_gamma() {
    let mut rng = rng::stream(12, 0);
    let gamma = 0.01;
    let n = 4000;
    let mut sum = 0.0;
    for _ in 0..n {
        let mut g =
            EvolvingGraph::from_labels(vec![label(Gender::Male), label(Gender::Female)]).unwrap();
        g.infect(0, 0.0).unwrap();
        let r = HivRates {
            lambda: 0.0,
            sigma: 0.0,
            gamma,
            beta: 0.0,
        };
        let mut sim = Simulation::new(g, r, 0.0, 0.5, WINDOW, 0.0, 1e9);
        let tr = sim.step(&mut rng).unwrap().unwrap();
        sum += tr.day;
    }
    let mean = sum / n as f64;
    assert!((mean - 1.0 / gamma).abs() < 0.05 / gamma, "{mean}");
}

#[test]
fn first_of_two_detections_is_exponential_with_twice_the_rate() {
    let mut rng = rng::stream(13, 0);
    let gamma = 0.02;
    let mut firsts: Vec<f64> = (0..10_000)
        .map(|_| {
            let mut g = EvolvingGraph::from_labels(vec![label(Gender::Male); 2]).unwrap();
            g.infect(0, 0.0).unwrap();
            g.infect(1, 0.0).unwrap();
            let r = HivRates {
                lambda: 0.0,
                sigma: 0.0,
                gamma,
                beta: 0.0,
            };
            let mut sim = Simulation::new(g, r, 0.0, 0.5, WINDOW, 0.0, 1e9);
            sim.step(&mut rng).unwrap().unwrap().day
        })
        .collect();
    let d = ks_exponential(&mut firsts, 2.0 * gamma);
    assert!(d < 1.628 / 100.0, "KS statistic {d}");
}

#[test]
fn no_contacts_no_infections() {
    let theta = Theta {
        n_initial_infected: 10,
        alpha: 0.5,
        gamma: 10.0,
        beta: 0.0,
        lambda: 0.0,
        sigma: 0.0,
    };
    let config = SimConfig {
        population: 100,
        ..SimConfig::default()
    };
    let traj = sim::run(&theta, &config, None).unwrap();
    assert!(traj
        .events
        .iter()
        .all(|e| matches!(e.kind, EventKind::DetectionRandom(_))));
    assert_eq!(traj.graph.removed().len(), 10);
    assert!(traj.final_day < 5.0);
}

#[test]
fn zero_horizon_returns_initial_state() {
    let config = SimConfig {
        population: 200,
        horizon: 0.0,
        snapshot_days: vec![0.0],
        ..SimConfig::default()
    };
    let traj = sim::run(&Theta::toy(), &config, None).unwrap();
    assert!(traj.events.is_empty());
    assert_eq!(traj.snapshots[0].len(), 0);
    assert_eq!(traj.graph.infective().len(), 100);
}

#[test]
fn trajectory_invariants() {
    let mut rng = rng::stream(14, 0);
    let theta = Theta {
        lambda: 0.2,
        sigma: 0.05,
        ..Theta::toy()
    };
    let config = SimConfig {
        population: 800,
        horizon: 600.0,
        ..SimConfig::default()
    };
    let graph = EvolvingGraph::init_population(
        &config.population_params(theta.n_initial_infected),
        &mut rng,
    )
    .unwrap();
    let mut sim = Simulation::from_theta(&theta, &config, graph);
    let mut removed = 0;
    let mut last_day = 0.0;
    let mut steps = 0;
    while let Some(tr) = sim.step(&mut rng).unwrap() {
        steps += 1;
        assert!(tr.day >= last_day);
        last_day = tr.day;
        let g = sim.graph();
        assert!(g.removed().len() >= removed);
        removed = g.removed().len();
        assert!(sim.rate_bound() + 1e-12 >= sim.exact_total_rate(sim.day()));
        let mut events = tr.events();
        if let Some(first) = events.next() {
            if let EventKind::Infection { .. } = first.kind {
                panic!("infection without a contact");
            }
            for later in events {
                assert!(matches!(later.kind, EventKind::Infection { .. }));
                assert!(matches!(first.kind, EventKind::Contact { .. }));
            }
        }
        if steps % 500 == 0 {
            g.validate().unwrap();
        }
    }
    assert!(steps > 100);
    sim.graph().validate().unwrap();
    for v in 0..sim.graph().len() {
        let l = sim.graph().label(v);
        if l.state == State::Removed {
            assert!(l.detection_time.unwrap() >= l.infection_time.unwrap());
        }
    }
}

#[test]
fn runs_are_reproducible() {
    let config = SimConfig {
        population: 500,
        horizon: 300.0,
        seed: 5,
        ..SimConfig::default()
    };
    let config = SimConfig {
        snapshot_days: sim::subdivision(0.0, 300.0, 3),
        ..config
    };
    let a = sim::run(&Theta::toy(), &config, None).unwrap();
    let b = sim::run(&Theta::toy(), &config, None).unwrap();
    assert_eq!(a.events, b.events);
    assert_eq!(a.snapshots, b.snapshots);
}

#[derive(Debug, Clone)]
struct Neighbour {
    detection: Option<f64>,
}

fn neighbour_strategy() -> impl Strategy<Value = Neighbour> {
    prop_oneof![
        Just(Neighbour { detection: None }),
        (0.0..2000.0f64).prop_map(|t| Neighbour {
            detection: Some(t.round())
        }),
        (0.0..2000.0f64).prop_map(|t| Neighbour { detection: Some(t) }),
    ]
}

proptest! {
    #[test]
    fn detection_rate_matches_recount(
        neighbours in prop::collection::vec(neighbour_strategy(), 0..12),
        day in 0.0..2500.0f64,
        boundary in 0usize..3,
        gamma in 0.0..1.0f64,
        beta in 0.0..1.0f64,
    ) {
        let mut neighbours = neighbours;
        // put one neighbour exactly on a window edge
        if let (Some(first), 1 | 2) = (neighbours.first_mut(), boundary) {
            let edge = if boundary == 1 { WINDOW.eta1 } else { WINDOW.eta2 };
            first.detection = Some(day - edge);
        }
        let n = neighbours.len();
        let mut labels = vec![label(Gender::Male)];
        labels.extend((0..n).map(|_| label(Gender::Female)));
        let mut g = EvolvingGraph::from_labels(labels).unwrap();
        g.infect(0, 0.0).unwrap();
        for (k, nb) in neighbours.iter().enumerate() {
            g.add_contact_edge(0, k + 1, 0.0).unwrap();
            if let Some(t) = nb.detection {
                g.infect(k + 1, 0.0).unwrap();
                g.detect(k + 1, t, DetectionType::Random).unwrap();
            }
        }
        let recount = neighbours
            .iter()
            .filter(|nb| matches!(nb.detection, Some(t) if day - 720.0 <= t && t <= day - 180.0))
            .count();
        let r = HivRates { lambda: 0.1, sigma: 0.1, gamma, beta };
        let got = detection_rate(&g, 0, day, &r, WINDOW).unwrap();
        prop_assert_eq!(got, gamma + beta * recount as f64);
    }
}

#[test]
fn window_edges_are_inclusive() {
    let day = 1000.0;
    for (t, inside) in [
        (day - 720.0, true),
        (day - 180.0, true),
        (day - 720.0 - 1e-9, false),
        (day - 180.0 + 1e-9, false),
    ] {
        let mut g =
            EvolvingGraph::from_labels(vec![label(Gender::Male), label(Gender::Female)]).unwrap();
        g.infect(0, 0.0).unwrap();
        g.infect(1, 0.0).unwrap();
        g.add_contact_edge(0, 1, 0.0).unwrap();
        g.detect(1, t, DetectionType::Random).unwrap();
        let r = rates();
        let rate = detection_rate(&g, 0, day, &r, WINDOW).unwrap();
        let expected = r.gamma + if inside { r.beta } else { 0.0 };
        assert_eq!(rate, expected, "t = {t}");
    }
}
