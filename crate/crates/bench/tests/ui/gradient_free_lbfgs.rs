use ndarray::Array2;
use optkit::{Function, Lbfgs};

struct Height;

impl Function<f64> for Height {
    fn evaluate(&self, x: &Array2<f64>) -> f64 {
        x.sum()
    }
}

fn main() {
    let mut x = Array2::zeros((2, 1));
    let _ = Lbfgs::default().optimize(&Height, &mut x, &mut []);
}
