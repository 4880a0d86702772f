"""
Capacity Page
VC Capacity Toolkit

Responsibilities:
- Collect one parameter point
- Call FastAPI through api_client
- Show analytic and Monte Carlo estimates side by side

No:
- Capacity formulas
- Plotting
"""

import pandas as pd
import requests
import streamlit as st

from utils.api_client import compute_capacity, get_defaults
from utils.sidebar import (
    FIELD_CHOICES,
    connection_error_message,
    method_selector,
    model_selector,
    parameter_form,
    render_sidebar,
)


# --------------------------------------------------
# Page Configuration
# --------------------------------------------------

st.set_page_config(
    page_title="Capacity - VC Capacity Toolkit",
    page_icon="📶",
    layout="wide"
)

render_sidebar()

st.title("📶 Ergodic Capacity")

st.write(
    """
Evaluate the ergodic capacity of the typical user at one
parameter point, analytically and by simulation.
"""
)

st.divider()


try:
    defaults = get_defaults()["params"]
except requests.ConnectionError:
    connection_error_message()
    st.stop()


# --------------------------------------------------
# Inputs
# --------------------------------------------------

overrides = parameter_form(defaults, "capacity")

models = model_selector("capacity")

methods = method_selector("capacity")

col1, col2, col3 = st.columns(3)

with col1:
    trials = st.number_input("Monte Carlo trials", min_value=100, value=1000, step=100)

with col2:
    samples = st.number_input("Analytic distance draws", min_value=2, value=200, step=50)

with col3:
    finite_region = FIELD_CHOICES[st.selectbox(
        "Analytic interference field",
        list(FIELD_CHOICES),
        help="Automatic uses the deployment disk whenever Monte Carlo runs"
    )]


# --------------------------------------------------
# Run
# --------------------------------------------------

if st.button("Compute", type="primary"):

    try:
        with st.spinner("Computing capacity..."):
            rows = compute_capacity(
                overrides,
                models,
                methods,
                trials=int(trials),
                samples=int(samples),
                finite_region=finite_region
            )
        st.session_state.capacity_rows = rows

    except requests.ConnectionError:
        connection_error_message()
    except RuntimeError as error:
        st.error(str(error))


if st.session_state.get("capacity_rows"):

    result_df = pd.DataFrame(st.session_state.capacity_rows)

    st.header("Results")

    st.dataframe(
        result_df.drop(columns=["swept_param", "value"]),
        use_container_width=True,
        hide_index=True
    )

    st.download_button(
        "📥 Download CSV",
        data=result_df.to_csv(index=False),
        file_name="capacity.csv",
        mime="text/csv"
    )
