//! Fits a discretized lognormal out-degree distribution to a target mean and
//! variance and prints it as `m,p` CSV.
//!
//!     cargo run --example fit_outdegree_pmf -- 10.29 181.189 800 > pmf.csv

use ctbp_select::model::OutDegreePmf;

fn main() -> ctbp_select::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse().expect("numeric argument")).collect();
    let (mean, var, max_m) = match args.as_slice() {
        [] => (10.29, 181.189, 800.0),
        [m, v, k] => (*m, *v, *k),
        _ => panic!("usage: fit_outdegree_pmf [MEAN VARIANCE MAX_M]"),
    };
    let pmf = OutDegreePmf::discrete_lognormal(mean, var, max_m as u32)?;
    eprintln!("mean {:.4}, variance {:.4}, support 1..={}", pmf.mean(), pmf.variance(), max_m);
    print!("{}", pmf.to_csv_string());
    Ok(())
}
