fn main() {
    // carcinogenesis reduced potential: h = -w - (2/9)/w + k0, P = -w^2/2 - (2/9) ln w + k0 w
    for k0 in [1.8f64, 2.0, 2.5, 3.0] {
        let c = 2.0/9.0;
        let p = |w: f64| -0.5*w*w - c*w.ln() + k0*w;
        let h = |w: f64| -w - c/w + k0;
        let disc = (k0*k0 - 4.0*c).sqrt();
        let w_minus = (k0 - disc)/2.0;
        let w_plus = (k0 + disc)/2.0;
        let hp = -1.0 + c/(w_minus*w_minus);
        let t_lin = std::f64::consts::PI/hp.sqrt();
        println!("k0={k0}: w-={:.4} w+={:.4} h'(w-)={:.3} T_lin={:.4}", w_minus, w_plus, hp, t_lin);
        // half period for s below w_minus: partner via bisection in (w_minus, w_plus)
        for s in [0.005, 0.01, 0.02, 0.04, 0.07, 0.10] {
            if s >= w_minus { continue; }
            let e = p(s);
            if e >= p(w_plus) { println!("  s={s}: above saddle level"); continue; }
            let (mut lo, mut hi) = (w_minus, w_plus);
            for _ in 0..80 { let m = 0.5*(lo+hi); if p(m) < e { lo = m; } else { hi = m; } }
            let partner = 0.5*(lo+hi);
            // midpoint quadrature
            let (mid, rad) = (0.5*(s+partner), 0.5*(partner-s));
            let nodes = 1<<14;
            let mut acc = 0.0;
            for i in 0..nodes {
                let th = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI*(i as f64 + 0.5)/nodes as f64;
                let v: f64 = mid + rad*th.sin();
                let den = 2.0*(e - p(v));
                if den > 0.0 { acc += rad*th.cos()/den.sqrt(); }
            }
            let t = acc*std::f64::consts::PI/nodes as f64;
            println!("  s={s}: partner={:.4} T_half={:.4} ratio={:.3}", partner, t, t/t_lin);
        }
        let _ = h;
    }
}
