use gplan::bench::make_delivery;
use gplan::features::{generate_pool, InstanceContext};
use gplan::learner::{encode, label_transitions};
use gplan::strips::ground;
use std::sync::Arc;
use std::time::Instant;

#[test]
fn intended_subset_feasibility() {
    let train: Vec<_> = [(1usize, 0u64), (1, 1), (2, 0), (2, 1)]
        .iter()
        .map(|&(p, s)| Arc::new(ground(Arc::new(make_delivery(3, 3, p, s).unwrap())).unwrap()))
        .collect();
    let limits = gplan::graph::Limits::default();
    let samples: Vec<_> = train
        .iter()
        .map(|t| {
            let g = gplan::graph::expand(t, &limits).unwrap();
            label_transitions(t.clone(), g).unwrap()
        })
        .collect();
    let ctxs: Vec<InstanceContext> =
        samples.iter().map(|s| InstanceContext::new(&s.task)).collect();
    let groups: Vec<_> = ctxs
        .iter()
        .zip(&samples)
        .map(|(c, s)| (c, s.graph.states.as_slice()))
        .collect();
    let mut pool = generate_pool(&groups, 8);
    println!("pool: {}", pool.len());
    let n_expr = gplan::features::parse_feature(
        "Dist(at_r,adjacent,Exists(Inverse(at),Not(delivered)))",
    )
    .unwrap();
    pool.push(gplan::features::Feature { expr: n_expr, cost: 8 });
    let n_idx = pool.len() - 1;
    let names: Vec<String> = pool.iter().map(|f| f.expr.to_string()).collect();
    let want = [
        "Bool(hold)",
        "Num(And(delivered_g,Not(delivered)))",
        "Dist(at_r,adjacent,target)",
        "Dist(at_r,adjacent,Exists(Inverse(at),Not(delivered)))",
    ];
    let mut idx = Vec::new();
    for w in &want[..3] {
        let i = names.iter().position(|n| n == w).unwrap();
        println!("found {w} at {i} cost {}", pool[i].cost);
        idx.push(i);
    }
    println!("all Dist(at_r,adjacent,...) features:");
    let cands: Vec<usize> = names
        .iter()
        .enumerate()
        .filter(|(_, n)| n.starts_with("Dist(at_r,adjacent,"))
        .map(|(i, _)| i)
        .collect();
    for &i in &cands {
        println!("  {i}: {} (cost {})", names[i], pool[i].cost);
    }
    let t0 = Instant::now();
    let enc = encode(&samples, &pool);
    println!("encode [{:?}]", t0.elapsed());
    // size stats for a static certificate encoding
    {
        let stats = enc.debug_stats();
        println!("stats: {:?}", stats);
    }
    // find the pool representative sharing the injected feature's values
    {
        use gplan::features::valuate;
        let exprs: Vec<_> = pool.iter().map(|f| f.expr.clone()).collect();
        let mut cols: Vec<Vec<gplan::features::Value>> = vec![Vec::new(); pool.len()];
        for (sample, ctx) in samples.iter().zip(&ctxs) {
            for st in &sample.graph.states {
                let v = valuate(&exprs, ctx, st);
                for (f, &x) in v.0.iter().enumerate() {
                    cols[f].push(x);
                }
            }
        }
        let target = cols[n_idx].clone();
        for (f, c) in cols.iter().enumerate() {
            if f != n_idx && *c == target {
                println!("n-representative: {f}: {} (cost {})", names[f], pool[f].cost);
            }
        }
    }
    let mut sub = idx.clone();
    sub.push(n_idx);
    println!(
        "intended quad: goal_sep={} term={}",
        enc.goal_separated(&sub),
        enc.terminating_selection(&sub).is_some()
    );
    println!("scan done [{:?}]", t0.elapsed());
    let _ = cands;
}
