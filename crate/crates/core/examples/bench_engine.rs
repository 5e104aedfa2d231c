use reactive_pinn::network::batched::{BatchEngine, Order};
use reactive_pinn::network::NetworkParams;
use std::time::Instant;
fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().unwrap()).collect();
    let (width, depth, n, chunk) = (args[0], args[1], args[2], args[3]);
    let mut sizes = vec![2]; sizes.extend(std::iter::repeat(width).take(depth)); sizes.push(3);
    let p = NetworkParams::<f64>::init(&sizes, 1).unwrap();
    let pts: Vec<[f64;2]> = (0..n).map(|i| [(i % 100) as f64 / 99.0, (i / 100) as f64 / 99.0]).collect();
    for order in [Order::Gradient, Order::Hessian] {
        let mut e = BatchEngine::new();
        let mut g = NetworkParams::zeros(&sizes).unwrap();
        let t = Instant::now();
        let reps = 5;
        for _ in 0..reps {
            for c in pts.chunks(chunk) {
                e.forward(&p, c, order);
                let d = e.output().to_owned();
                e.backward(&p, d.view(), &mut g);
            }
        }
        println!("{order:?}: {:.4} s/epoch", t.elapsed().as_secs_f64() / reps as f64);
    }
}
