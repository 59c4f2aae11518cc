import pandas as pd
from pyspark.sql import SparkSession
from pyspark.sql.types import *
from pyspark.sql.functions import lit


def clean(frame):
    return frame


## target_code = pandas
## raw = load as csv 'data/raw.csv'
raw = pd.read_csv('data/raw.csv')  # <tabledsl>
## on raw : describe
## small = on raw : select_cols id, name, score
print("loaded", len(raw))

## small = on small : on_missing fill_with 0 : sort_by score
## big = on small : select_rows score > 10 and name not in ['x', 'y']
if len(small) > 0:
    ## top = on big : return_top_N 5
    print(top)
    ## grouped = on big : group_by name apply mean
stale = 1  # <tabledsl>

## renamed = on grouped : rename_cols score to avg_score
## on renamed : save as json to 'out/avg.json'
## on renamed : append_row name default 'total'

## target_code = spark
## start_session named 'tabledsl demo'
## s = schema id of int, name of str, score of float
## df = load 'data/raw.csv' with_schema s
## clean_df = on df : drop_duplicates : on_missing drop_rows
## on clean_df : group_by name apply unique : show
## on clean_df : apply_fun clean on rows
## trimmed = on clean_df : drop_cols score
## on trimmed : replace 'n/a' by 'unknown' : count
## on trimmed : show
## stop_session
print("done")
## on df : show
# ## not DSL: the prefix has to open the comment
    # ordinary comment
x = 1


def main():
    ## on raw : show
    return 0
