use std::time::Instant;
use xiscope::scanner::{self, CheckSet, KernelSource};
use xiscope::{PrecisionConfig, XiEvaluator};

fn main() {
    let cfg = PrecisionConfig::auto_for_t(30.0).unwrap();
    let ev = XiEvaluator::new(cfg.clone(), 30.0).unwrap();
    let src = KernelSource::new(&ev);
    let checks = CheckSet {
        peak_valley: true,
        lagarias_step: Some(0.01),
        lemma1_samples: Some(20),
        zero_count_t: Some(30.0),
    };
    let t0 = Instant::now();
    let report = scanner::scan_range(&src, &[0.1, 0.3, 0.5], (5.0, 30.0), &checks, &cfg).unwrap();
    println!("mini scan took {:?}", t0.elapsed());
    println!("{}", xiscope::report::scan_report_json(&report));
}
