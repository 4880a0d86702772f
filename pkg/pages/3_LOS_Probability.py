"""
LOS Probability Page
VC Capacity Toolkit

Responsibilities:
- Configure the lambda x K (x R) table
- Call FastAPI through api_client
- Show probabilities with their confidence intervals

No:
- Simulation logic
- Plotting
"""

import pandas as pd
import requests
import streamlit as st

from utils.api_client import compute_los_probability
from utils.sidebar import connection_error_message, render_sidebar


# --------------------------------------------------
# Page Configuration
# --------------------------------------------------

st.set_page_config(
    page_title="LOS Probability - VC Capacity Toolkit",
    page_icon="📡",
    layout="wide"
)

render_sidebar()

st.title("📡 Serving-Link LOS Probability")

st.write(
    """
Probability that all K serving APs are in line of sight,
estimated by simulation with a 95% Wilson interval.
"""
)

st.divider()


# --------------------------------------------------
# Inputs
# --------------------------------------------------

lambda_text = st.text_input("AP densities (comma separated)", value="0.001, 0.0025, 0.005, 0.01")

k_text = st.text_input("Serving set sizes K", value="1, 2, 3")

radius_text = st.text_input("Region radii R in meters", value="100")

trials = st.number_input("Trials per point", min_value=100, value=10_000, step=1000)


# --------------------------------------------------
# Run
# --------------------------------------------------

if st.button("Estimate", type="primary"):

    try:
        lambdas = [float(value) for value in lambda_text.split(",") if value.strip()]
        k_values = [int(value) for value in k_text.split(",") if value.strip()]
        radii = [float(value) for value in radius_text.split(",") if value.strip()]

        with st.spinner("Simulating deployments..."):
            rows = compute_los_probability(
                {},
                lambdas,
                k_values,
                radii=radii,
                trials=int(trials)
            )
        st.session_state.los_rows = rows

    except ValueError:
        st.error("Densities, K values and radii must be comma-separated numbers.")
    except requests.ConnectionError:
        connection_error_message()
    except RuntimeError as error:
        st.error(str(error))


if st.session_state.get("los_rows"):

    los_df = pd.DataFrame(st.session_state.los_rows)

    st.header("LOS-Serving Probability")

    st.dataframe(los_df, use_container_width=True, hide_index=True)

    st.subheader("Probability by density and K")

    st.dataframe(
        los_df.pivot_table(
            index=["region_radius", "lambda"],
            columns="k_serving",
            values="probability"
        ),
        use_container_width=True
    )

    st.download_button(
        "📥 Download CSV",
        data=los_df.to_csv(index=False),
        file_name="los_probability.csv",
        mime="text/csv"
    )
