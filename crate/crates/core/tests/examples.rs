//! Every example must run to completion.

mod case_atlas {
    include!("../examples/case_atlas.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod commutant {
    include!("../examples/commutant.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod counting {
    include!("../examples/counting.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod dynamics {
    include!("../examples/dynamics.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod grading {
    include!("../examples/grading.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod instance_report {
    include!("../examples/instance_report.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod partitions {
    include!("../examples/partitions.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod profiles {
    include!("../examples/profiles.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod refinement {
    include!("../examples/refinement.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod selftest {
    include!("../examples/selftest.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod twisted_convolution {
    include!("../examples/twisted_convolution.rs");

    #[test]
    fn runs() {
        main();
    }
}
