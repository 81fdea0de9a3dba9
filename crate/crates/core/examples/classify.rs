//! Large-k limit of the truncation constant for the enumerated schedule
//! families.
//!
//! cargo run --release --example classify

use pd_truncation::bounds::{classify_limit, LimitFamily, Schedule};

fn main() {
    let families = [
        LimitFamily::DenseFixed {
            delta: Schedule::Const(0.1),
        },
        LimitFamily::DenseFixed {
            delta: Schedule::Const(-0.1),
        },
        LimitFamily::DenseFixed {
            delta: Schedule::power(1.0, -0.5),
        },
        LimitFamily::DenseFixed {
            delta: Schedule::power(1.0, -1.0),
        },
        LimitFamily::DenseStochasticExp {
            sigma: Schedule::power(1.0, -2.0),
        },
        LimitFamily::DenseStochasticExp {
            sigma: Schedule::power(1.0, -1.0),
        },
        LimitFamily::DenseStochasticGamma {
            alpha: 2.0,
            sigma: Schedule::power(1.0, -1.5),
        },
        LimitFamily::SparseFixed {
            delta: Schedule::Const(0.1),
            eta: Schedule::power(0.5, -0.25),
        },
        LimitFamily::SparseFixed {
            delta: Schedule::Const(0.1),
            eta: Schedule::power(0.5, -0.5),
        },
        LimitFamily::SparseDegreeBounded {
            sigma: Schedule::power(1.0, -0.5),
            max_degree: Schedule::power(1.0, 0.5),
        },
    ];
    for f in &families {
        let v = classify_limit(f);
        println!(
            "{:<70} {:?}\n{:>70}  {}",
            serde_json::to_string(f).unwrap(),
            v.limit,
            "",
            v.rule
        );
    }
}
