import streamlit as st


# Label -> finite_region sent to the backend (None lets it decide)
FIELD_CHOICES = {
    "Automatic": None,
    "Deployment disk R": True,
    "Infinite plane": False,
}


def render_sidebar() -> None:
    """
    Renders the shared sidebar block: a header and one bordered
    card per page. Call once near the top of every page script
    (including Landing_Page.py).
    """

    with st.sidebar:

        st.header("Navigation")

        st.caption("Use the sidebar pages to access:")

        with st.container(border=True):
            st.markdown("**Capacity**")
            st.caption("Analytic and simulated capacity at one parameter point.")

        with st.container(border=True):
            st.markdown("**Sweep**")
            st.caption("Capacity over a lambda, beta or K grid.")

        with st.container(border=True):
            st.markdown("**LOS Probability**")
            st.caption("Probability that every serving link is LOS.")

        st.info(
            "Results are computed by the backend; start it with "
            "`uvicorn backend.main:app`."
        )


def parameter_form(defaults: dict, key: str) -> dict:
    """
    Number inputs for the parameters users vary most often.
    Returns only the values that differ from `defaults`.
    """

    col1, col2, col3 = st.columns(3)

    with col1:
        lam = st.number_input(
            "AP density lambda (APs/m²)",
            value=float(defaults["lambda"]),
            format="%.5f",
            step=0.0005,
            key=f"{key}_lambda"
        )

    with col2:
        beta = st.number_input(
            "Blockage beta (1/m)",
            value=float(defaults["beta"]),
            format="%.4f",
            step=0.001,
            key=f"{key}_beta"
        )

    with col3:
        k_serving = st.number_input(
            "Serving APs K",
            min_value=1,
            value=int(defaults["k_serving"]),
            step=1,
            key=f"{key}_k"
        )

    chosen = {
        "lambda": lam,
        "beta": beta,
        "k_serving": int(k_serving),
    }

    return {
        name: value
        for name, value in chosen.items()
        if value != defaults[name]
    }


def connection_error_message() -> None:
    st.error(
        "Cannot connect to the backend.\n\n"
        "Start FastAPI using:\n\n"
        "uvicorn backend.main:app --reload"
    )


def model_selector(key: str) -> list:
    return st.multiselect(
        "Fading models",
        ["nakagami:3,2", "rayleigh:1", "nofading"],
        default=["nakagami:3,2", "rayleigh:1", "nofading"],
        key=f"{key}_models"
    )


def method_selector(key: str) -> list:
    return st.multiselect(
        "Methods",
        ["analytic-sampled", "analytic-nested", "montecarlo"],
        default=["analytic-sampled", "montecarlo"],
        key=f"{key}_methods"
    )
