"""
Sweep Page
VC Capacity Toolkit

Responsibilities:
- Configure a lambda / beta / K sweep
- Call FastAPI through api_client
- Show the sweep table and offer it as CSV

No:
- Capacity formulas
- Plotting
"""

import pandas as pd
import requests
import streamlit as st

from utils.api_client import get_defaults, run_sweep
from utils.sidebar import (
    FIELD_CHOICES,
    connection_error_message,
    method_selector,
    model_selector,
    render_sidebar,
)


GRID_PRESETS = {
    "lambda": "0.0005, 0.001, 0.0025, 0.005",
    "beta": "0.0071, 0.01, 0.02",
    "k_serving": "1, 2, 3",
}


# --------------------------------------------------
# Page Configuration
# --------------------------------------------------

st.set_page_config(
    page_title="Sweep - VC Capacity Toolkit",
    page_icon="📈",
    layout="wide"
)

render_sidebar()

st.title("📈 Parameter Sweep")

st.write(
    """
Capacity over a grid of one parameter, for every selected
fading model and method. Rows come back in grid order.
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

swept_parameter = st.selectbox("Swept parameter", list(GRID_PRESETS))

grid_text = st.text_input(
    "Grid (comma separated)",
    value=GRID_PRESETS[swept_parameter]
)

models = model_selector("sweep")

methods = method_selector("sweep")

col1, col2, col3 = st.columns(3)

with col1:
    trials = st.number_input("Monte Carlo trials", min_value=100, value=1000, step=100)

with col2:
    samples = st.number_input("Analytic distance draws", min_value=2, value=200, step=50)

with col3:
    k_serving = st.number_input(
        "Serving APs K",
        min_value=1,
        value=int(defaults["k_serving"]),
        step=1
    )

finite_region = FIELD_CHOICES[st.selectbox("Analytic interference field", list(FIELD_CHOICES))]


# --------------------------------------------------
# Run
# --------------------------------------------------

if st.button("Run sweep", type="primary"):

    try:
        grid = [float(value) for value in grid_text.split(",") if value.strip()]

        params = {}
        if swept_parameter != "k_serving":
            params["k_serving"] = int(k_serving)

        with st.spinner(f"Running {len(grid) * len(models) * len(methods)} points..."):
            rows = run_sweep(
                params,
                swept_parameter,
                grid,
                models,
                methods,
                trials=int(trials),
                samples=int(samples),
                finite_region=finite_region
            )
        st.session_state.sweep_rows = rows

    except ValueError:
        st.error("The grid must be a comma-separated list of numbers.")
    except requests.ConnectionError:
        connection_error_message()
    except RuntimeError as error:
        st.error(str(error))


if st.session_state.get("sweep_rows"):

    sweep_df = pd.DataFrame(st.session_state.sweep_rows)

    st.header("Sweep Results")

    st.dataframe(sweep_df, use_container_width=True, hide_index=True)

    failed = sweep_df[sweep_df["status"] != "ok"]

    if not failed.empty:
        st.warning(f"{len(failed)} point(s) did not finish cleanly; see the status column.")

    st.download_button(
        "📥 Download CSV",
        data=sweep_df.to_csv(index=False),
        file_name=f"sweep_{sweep_df['swept_param'].iloc[0]}.csv",
        mime="text/csv"
    )
