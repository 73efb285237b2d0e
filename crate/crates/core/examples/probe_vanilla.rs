use qaoa_mcts::analysis::approximation_ratio;
use qaoa_mcts::data::cubic_graphs_n10;
use qaoa_mcts::mcts::MctsConfig;
use qaoa_mcts::problem::DiagonalCost;
use qaoa_mcts::qaoa::{evaluate_cost, Schedule};
use qaoa_mcts::ssr::{run_iterative, RestrictionEdges, SofteningSchedule};

fn main() {
    let graphs = cubic_graphs_n10();
    for gi in [0usize, 5] {
        let diag = DiagonalCost::build(&graphs[gi].clone().into()).unwrap();
        println!("graph {gi}: ground {} max {}", diag.ground_energy(), diag.max_energy());

        // exact P=1 scan for reference
        let m = 120;
        let mut best = (f64::INFINITY, 0.0, 0.0);
        for i in 0..m {
            for j in 0..m {
                let g = i as f64 * std::f64::consts::PI / m as f64;
                let b = j as f64 * std::f64::consts::TAU / m as f64;
                let e = evaluate_cost(&diag, &Schedule::new(vec![(g, b)]).unwrap()).energy;
                if e < best.0 { best = (e, g, b); }
            }
        }
        println!("  P=1 scan optimum: E {:.4} at gamma {:.3} beta {:.3}", best.0, best.1, best.2);

        let cfg = MctsConfig { seed: 400 + gi as u64, ..Default::default() };
        let results = run_iterative(&diag, 6, &cfg, 30, &SofteningSchedule::benchmark(), &RestrictionEdges::default(), None).unwrap();
        for (p, r) in results.iter().enumerate() {
            let ratio = approximation_ratio(&diag, r.energy).unwrap();
            let gs: Vec<String> = r.schedule.gammas().map(|g| format!("{g:.2}")).collect();
            let bs: Vec<String> = r.schedule.betas().map(|b| format!("{b:.2}")).collect();
            println!(
                "  P={} E {:.4} r {:.4} gamma [{}] beta [{}]",
                p + 1, r.energy, ratio, gs.join(" "), bs.join(" ")
            );
        }
    }
}
