use harnack_lab::csf::curve::{make_curve, CurveSpec};
use harnack_lab::csf::flow::{run_flow, FlowParams, Scheme};
use harnack_lab::expander::track::spacetime_track;

fn main() {
    let c = make_curve(&CurveSpec::Circle { radius: 1.0 }, 128).unwrap();
    let h = run_flow(&c, 0.43, &FlowParams { dt: 5e-5, store_every: 20, scheme: Scheme::Heun }).unwrap();
    let track = spacetime_track(&h, 6.0, 121).unwrap();
    let f = &track.field;
    for iy in [30usize, 60, 90] {
        let mut prev = f64::NEG_INFINITY;
        for ix in 60..f.resolution() {
            let v = f.at(ix, iy);
            if v < prev - 1e-12 {
                println!("dip at iy={iy} ix={ix}: v={v:.12} prev={prev:.12} diff={:e} covered={} {}",
                    v - prev, track.covered[iy*121+ix], track.covered[iy*121+ix-1]);
            }
            prev = v;
        }
    }
    println!("done");
}
